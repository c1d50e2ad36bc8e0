"""Kernel backend selection.

Imports the compiled quaternion kernel when it is built, otherwise the
pure-Python twin.  Set COBORD2_PURE=1 to force the pure backend.
"""

import os

if os.environ.get("COBORD2_PURE") == "1":
    from cobord2._kernel._quatpy import *  # noqa: F401,F403
else:
    try:
        from cobord2._kernel._quatc import *  # type: ignore # noqa: F401,F403
    except ImportError:
        from cobord2._kernel._quatpy import *  # noqa: F401,F403

from cobord2._kernel import _quatpy as pure_backend  # noqa: F401

try:
    from cobord2._kernel import _quatc as compiled_backend  # type: ignore # noqa: F401
except ImportError:
    compiled_backend = None
