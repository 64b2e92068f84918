"""CMake-backed build_ext shim: compiles the _core extension with the same
CMakeLists.txt used for the standalone C++ build."""

import shutil
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        ext_path = Path(self.get_ext_fullpath(ext.name)).resolve()
        ext_path.parent.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                "-S", str(source_dir),
                "-B", str(build_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                f"-DPYTHON_EXECUTABLE={sys.executable}",
            ],
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "cespin_pymod"],
            check=True,
        )

        built = list((build_dir / "python" / "cespin").glob("_core*.so"))
        if not built:
            raise RuntimeError("cespin_pymod did not produce a _core extension")
        shutil.copy2(built[0], ext_path)


setup(
    ext_modules=[CMakeExtension("cespin._core")],
    cmdclass={"build_ext": CMakeBuild},
)
