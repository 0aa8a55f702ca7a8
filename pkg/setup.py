"""Build hook for the optional compiled search kernel.

The package is pure Python; igkit._speedups is a drop-in accelerator for the
sentential-form expansion kernel. If Cython or a C compiler is missing the
extension is skipped and igkit falls back to igkit._expand_py at import time.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("IGKIT_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/igkit/_speedups.pyx"],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        pass


if ext_modules:
    from setuptools.command.build_ext import build_ext

    class optional_build_ext(build_ext):  # noqa: N801
        """Never fail the install because the accelerator would not compile."""

        def run(self):
            try:
                super().run()
            except Exception as exc:  # pragma: no cover - toolchain dependent
                print(f"warning: skipping compiled kernel ({exc}); using pure-Python fallback")

        def build_extension(self, ext):
            try:
                super().build_extension(ext)
            except Exception as exc:  # pragma: no cover - toolchain dependent
                print(f"warning: skipping {ext.name} ({exc}); using pure-Python fallback")

    setup(ext_modules=ext_modules, cmdclass={"build_ext": optional_build_ext})
else:
    setup()
