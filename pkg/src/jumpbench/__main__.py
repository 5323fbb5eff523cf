import sys

from jumpbench.cli import main

sys.exit(main())
