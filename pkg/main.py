#!/usr/bin/env python3
"""
RIS-DCC command-line entry point

Equivalent to the installed ``risdcc`` script.
"""

import sys

from risdcc.main import main

if __name__ == "__main__":
    sys.exit(main())
