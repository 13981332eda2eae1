"""Module entry point so ``python -m rhetembed`` works."""

import sys

from rhetembed.cli import main

sys.exit(main())
