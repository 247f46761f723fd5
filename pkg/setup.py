from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("luequiv._coset", ["src/luequiv/_coset.pyx"], optional=True)],
        language_level=3,
    )

setup(ext_modules=ext_modules)
