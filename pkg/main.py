# -*- coding: utf-8 -*-
import sys

from views.command_line import CommandLineApp


def main():
    app = CommandLineApp()
    sys.exit(app.run(sys.argv[1:]))

if __name__ == "__main__":
    main()
