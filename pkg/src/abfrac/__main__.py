import sys

from abfrac.cli import main

sys.exit(main())
