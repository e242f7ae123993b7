"""Console entry point.

Thread knobs (--threads flag or SEMBOOST_THREADS) must land in the
environment before numpy/numba initialize their thread pools, so this
module stays import-light and defers the real work to ``_cli_impl``.
"""

from __future__ import annotations

import os
import sys


def _requested_threads(argv) -> str | None:
    for i, arg in enumerate(argv):
        if arg == "--threads" and i + 1 < len(argv):
            return argv[i + 1]
        if arg.startswith("--threads="):
            return arg.split("=", 1)[1]
    return os.environ.get("SEMBOOST_THREADS")


def _apply_thread_env(argv) -> None:
    threads = _requested_threads(argv)
    if not threads:
        return
    for var in (
        "OPENBLAS_NUM_THREADS",
        "OMP_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMBA_NUM_THREADS",
    ):
        os.environ.setdefault(var, threads)


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    _apply_thread_env(argv)
    from . import _cli_impl

    return _cli_impl.run(argv)


if __name__ == "__main__":
    sys.exit(main())
