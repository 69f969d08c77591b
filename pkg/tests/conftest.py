import pytest

from pettis_forge import (
    PsiSpec,
    SequenceRule,
    build_continuous_model,
    build_model,
)


@pytest.fixture(scope="session")
def power34_spec():
    return PsiSpec("power", exponent=0.75)


@pytest.fixture(scope="session")
def unit_rule():
    return SequenceRule("affine")


@pytest.fixture(scope="session")
def model24(power34_spec, unit_rule):
    """The reference model: power 3/4 gauge, l2 backend, depth 24."""
    return build_model(None, power34_spec, K=1.0, p=2.0, rule=unit_rule, depth=24)


@pytest.fixture(scope="session")
def model12(power34_spec, unit_rule):
    return build_model(None, power34_spec, K=1.0, p=2.0, rule=unit_rule, depth=12)


@pytest.fixture(scope="session")
def cmodel9():
    """The reference continuous model: s^(1/4) gauge, p_n = 4n, depth 9."""
    return build_continuous_model(
        PsiSpec("power", exponent=0.25), K=1.0, rule=SequenceRule("affine", a=4.0), depth=9
    )
