import pytest
from hypothesis import settings

from algclt.moments import SiteDistribution

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def bernoulli():
    return SiteDistribution.symmetric_bernoulli()


def two_label_distribution():
    """Site law of a non-self-adjoint ``c`` with adjoint ``c*``: a 2x2 matrix unit model.

    ``c = E_12`` under the state ``<e_1, . e_1>`` on 2x2 matrices, so a
    label-word has moment 1 exactly when it reads ``c c* c c* ...`` from the
    right ending on ``e_1``.
    """

    def moment(labels):
        # act on e_1 from the right end of the word
        state = 1
        for x in reversed(labels):
            if x == "c" and state == 2:
                state = 1
            elif x == "c*" and state == 1:
                state = 2
            else:
                return 0
        return 1 if state == 1 else 0

    return SiteDistribution(moment, adjoint={"c": "c*", "c*": "c"}, labels=("c", "c*"))


@pytest.fixture
def two_label():
    return two_label_distribution()
