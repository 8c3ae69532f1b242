import os
import tempfile
from contextlib import contextmanager

from .logger import get_logger

logger = get_logger(__name__)


@contextmanager
def atomic_open(path: str, mode: str = "w", newline: str = ""):
    """
    Open a temporary sibling of ``path`` and rename it into place on success.

    Args:
        path (str): Final destination
        mode (str): "w" for text or "wb" for binary
        newline (str): Newline policy for text mode
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        if "b" in mode:
            handle = os.fdopen(fd, mode)
        else:
            handle = os.fdopen(fd, mode, newline=newline, encoding="utf-8")
        with handle:
            yield handle
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
