import sys

from clothfold.cli import main

sys.exit(main())
