import sys

from eigenstrain.cli import main

sys.exit(main())
