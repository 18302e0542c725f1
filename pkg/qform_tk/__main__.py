import sys

from qform_tk.cli import main

sys.exit(main())
