"""Run the command-line driver."""
import sys

from .cli import main

sys.exit(main())
