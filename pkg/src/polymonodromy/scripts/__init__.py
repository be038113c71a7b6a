# This file marks the scripts directory as a Python package.
