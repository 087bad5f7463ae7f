import pytest

from probhopf.classdata import class_data
from probhopf.fusion import s3_character_ring, to_probgroup
from probhopf.groups import BUILTIN_GROUPS, builtin_group
from probhopf.probgroup import ProbabilityGroup

BUILTINS = sorted(BUILTIN_GROUPS, key=lambda s: (s[0] != "Z", len(s), s))
ABELIAN = [name for name in BUILTINS if name.startswith("Z")]


@pytest.fixture(scope="session")
def class_cache():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = class_data(builtin_group(name))
        return cache[name]
    return get


@pytest.fixture
def kS3() -> ProbabilityGroup:
    return to_probgroup(s3_character_ring())


def z2_group() -> ProbabilityGroup:
    return ProbabilityGroup(("1", "a"), {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 0): 1})

