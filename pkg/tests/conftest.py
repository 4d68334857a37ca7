import numpy as np
import pytest

from plankforge.boxes import Box
from plankforge.datagen import GenConfig, gen_cabinet
from plankforge.dsl import parse_program

# The eight-cuboid wardrobe used as the reference fixture throughout.
CABINET_TEXT = """\
bbox = Cuboid(-0.35, -0.23, -0.76, 0.35, 0.23, 0.76)
plank1 = Cuboid(bbox_1, bbox_2, bbox_3, -0.34, bbox_5, bbox_6)
plank2 = Cuboid(0.34, bbox_2, bbox_3, bbox_4, bbox_5, bbox_6)
plank3 = Cuboid(plank1_4, bbox_2, -0.70, plank2_1, bbox_5, -0.69)
plank4 = Cuboid(plank1_4, bbox_2, 0.75, plank2_1, bbox_5, bbox_6)
plank5 = Cuboid(plank1_4, 0.21, plank3_6, plank2_1, 0.22, plank4_3)
plank6 = Cuboid(plank1_4, bbox_2, bbox_3, plank2_1, -0.21, plank3_3)
plank7 = Cuboid(plank1_4, 0.21, bbox_3, plank2_1, bbox_5, plank3_3)
"""


@pytest.fixture(scope="session")
def cabinet_program():
    return parse_program(CABINET_TEXT)


@pytest.fixture
def unit_box():
    return Box(-0.5, -0.5, -0.5, 0.5, 0.5, 0.5)


def make_programs(n, seed=11, config=GenConfig(max_edges=None)):
    """Deterministic batch of generated programs for property tests."""
    out = []
    for i in range(n):
        rng = np.random.default_rng([seed, i])
        out.append(gen_cabinet(rng, config))
    return out
