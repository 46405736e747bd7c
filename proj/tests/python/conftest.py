import os
import sys

# Make both the CMake-built extension and the python package importable when
# running from the build tree (pip-installed layouts need neither).
for var in ("ALMA_BUILD_DIR", "ALMA_PYTHON_DIR"):
    path = os.environ.get(var)
    if path and path not in sys.path:
        sys.path.insert(0, path)
