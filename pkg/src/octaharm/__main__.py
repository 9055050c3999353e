import sys

from octaharm.cli import main

sys.exit(main())
