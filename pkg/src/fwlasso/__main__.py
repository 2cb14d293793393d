import sys

from .FWLassoCLI import main

sys.exit(main())
