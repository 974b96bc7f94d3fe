import contextlib
import os
import tempfile
from pathlib import Path


def create_dir(dirpath):
    "Create directory tree to `dirpath`; ignore if already exists"
    if not os.path.isdir(dirpath):
        os.makedirs(dirpath)


def check_dir(directory):
    """Returns ``True`` if given path is a directory and writeable, ``False`` otherwise."""
    return os.path.isdir(directory) and os.access(directory, os.W_OK)


@contextlib.contextmanager
def atomic_open(filepath, mode="w", **kwargs):
    """Write to a temporary file in the target directory, then move it into place.

    Readers never see a half-written file. If the block raises, the target is left untouched."""
    if mode[0] not in "wx" or "+" in mode:
        raise ValueError("invalid mode: '{}'".format(mode))
    filepath = Path(filepath)
    if "b" not in mode:
        kwargs.setdefault("encoding", "utf-8")
        # Never translate ``\n`` on Windows
        kwargs.setdefault("newline", "")
    f = tempfile.NamedTemporaryFile(
        mode="w" + mode[1:],
        prefix=filepath.name,
        suffix=".tmp",
        dir=filepath.parent,
        delete=False,
        **kwargs
    )
    try:
        yield f
    except BaseException:
        f.close()
        os.unlink(f.name)
        raise
    else:
        f.close()
        os.replace(f.name, filepath)
