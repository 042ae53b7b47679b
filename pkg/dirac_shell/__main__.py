import sys

from dirac_shell.main import main

sys.exit(main())
