import os

import pytest

from cur_kernel.prelude import base_env

CORPUS_DIR = os.path.join(os.path.dirname(__file__), "corpus")


@pytest.fixture(scope="session")
def env():
    """A prelude environment shared across tests.

    Declaration processing copies before extending, so sharing is safe.
    """
    return base_env()


def corpus_files():
    return sorted(
        os.path.join(CORPUS_DIR, f)
        for f in os.listdir(CORPUS_DIR)
        if f.endswith(".cur")
    )


def corpus_sources():
    out = []
    for path in corpus_files():
        with open(path, encoding="utf-8") as fh:
            out.append((os.path.basename(path), fh.read()))
    return out
