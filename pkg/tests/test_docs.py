import doctest

import hodatalog


def test_package_docstring():
    result = doctest.testmod(hodatalog)
    assert result.attempted > 0 and result.failed == 0
