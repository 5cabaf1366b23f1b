"""
Debug output helpers. Library modules log through `logging`; the CLI decides
where the records end up.

To watch debug output in other terminal, run `tty` there:
$ tty
/dev/pts/1
and pass `--debug-tty /dev/pts/1`.
"""

import logging
import sys
import typing as t


LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def setup_stderr(terminal: t.Optional[str] = None, verbose: bool = False) -> None:
    """Redirect log records (stderr) to other terminal and set level."""
    stream = sys.stderr
    if terminal:
        stream = open(terminal, "w")

    handler = logging.StreamHandler(stream)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))

    root = logging.getLogger("nctorus")
    root.handlers = [handler]
    root.setLevel(logging.DEBUG if verbose or terminal else logging.WARNING)
    root.propagate = False
