"""``python -m cherednik``."""

import sys

from .cli import main

sys.exit(main())
