import sys

from rhetrel.cli import main

sys.exit(main())
