from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("tacticforge._ckernels", ["src/tacticforge/_ckernels.pyx"])],
        language_level=3,
    )
except ImportError:
    # pure-Python fallback kernels are used when the extension is absent
    ext_modules = []

setup(ext_modules=ext_modules)
