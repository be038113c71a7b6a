# This file marks polymonodromy as a Python package.
__version__ = "0.2.0"
