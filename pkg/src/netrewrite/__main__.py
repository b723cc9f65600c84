import sys

from netrewrite.cli import main

sys.exit(main())
