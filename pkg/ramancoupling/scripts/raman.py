#!/usr/bin/env python
# -*- python -*-
# Author: ramancoupling developers
# Created: October 2026

import sys


def main():
    from ramancoupling.commands import main as run
    return run(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
