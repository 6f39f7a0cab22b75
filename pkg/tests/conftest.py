import io
from contextlib import redirect_stderr, redirect_stdout

import pytest

from triopoly.cli import run_cli


@pytest.fixture
def cli():
    """Invoke the CLI in-process, capturing exit code, stdout, and stderr."""

    def invoke(argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = run_cli(argv)
        return code, out.getvalue(), err.getvalue()

    return invoke
