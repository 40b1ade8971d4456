from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the pure-Python
# mirror (wrcsampler._kernel_py) when the extension is absent.
try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension("wrcsampler._kernel", ["src/wrcsampler/_kernel.pyx"])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
