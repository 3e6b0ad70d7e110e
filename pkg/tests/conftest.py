import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from magucp import catalog, make_rules  # noqa: E402
from magucp.quadrature import RadiiGrid  # noqa: E402

CATALOG_2D = [
    ("gaussian", {"N": 2}),
    *[("harmonic2d", {"k": k}) for k in range(1, 6)],
    ("constant_field", {"a": [0.5, -0.3]}),
    ("rotational_gauss", {"b": 1.0}),
    ("rotational_gauss", {"b": 2.5}),
]
CATALOG_3D = [
    ("gaussian", {"N": 3}),
    ("constant_field", {"a": [0.2, 0.1, -0.4]}),
    ("rotational_gauss", {"b": 0.5, "N": 3}),
]
CATALOG = CATALOG_2D + CATALOG_3D


def catalog_id(entry):
    name, params = entry
    return name + "(" + ",".join(f"{k}={v}" for k, v in params.items()) + ")"


@pytest.fixture(scope="session")
def rules2():
    return make_rules(2)


@pytest.fixture(scope="session")
def rules3():
    return make_rules(3, sphere_order=23, radial_nodes=48)


@pytest.fixture(scope="session")
def rules_for(rules2, rules3):
    return lambda triple: rules2 if triple.dimension == 2 else rules3


@pytest.fixture(scope="session")
def default_grid():
    return RadiiGrid.uniform()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=CATALOG, ids=catalog_id)
def any_triple(request):
    name, params = request.param
    return catalog(name, params)


# --------------------------------------------------------------------------
# one summary line per acceptance criterion
# --------------------------------------------------------------------------

_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid or report.when != "call" and not report.failed:
        return
    func = report.nodeid.split("::")[-1].split("[")[0]
    if not func.startswith("test_ac"):
        return
    key = func[len("test_ac"):].split("_", 1)
    criterion = int(key[0])
    title = key[1].replace("_", " ") if len(key) > 1 else ""
    ok = _acceptance.get(criterion, (title, True))[1] and not report.failed
    _acceptance[criterion] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_acceptance):
        title, ok = _acceptance[criterion]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {criterion:2d}: {title}")
