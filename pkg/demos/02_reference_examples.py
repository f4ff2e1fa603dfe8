"""Re-solve every bundled fixture and compare against its reference bounds.

Equivalent to `qrelax paper-examples`.  The oracle rows re-derive the global
optimum of each tiny instance by grid scan + polish, independently of the
conic pipeline.
"""

import sys

from qrelax.cli import main

sys.exit(main(["paper-examples"]))
