import pytest

from plankforge.attach import CyclicAttachmentError, infer_attachments
from plankforge.boxes import Box
from plankforge.program import Coord, resolve, validate

THRESH = 0.001  # 1mm at the default 1000 mm/unit scale


class TestInferAttachments:
    def test_panel_shelf_flush(self):
        panel = Box(-0.35, -0.23, -0.76, -0.34, 0.23, 0.76)
        shelf = Box(-0.34, -0.23, -0.70, 0.34, 0.23, -0.69)
        p = infer_attachments([panel, shelf], THRESH)
        shelf_coords = p.planks[1].coords
        assert shelf_coords[0] == Coord.attach(1, 3)  # x_min -> panel.x_max
        assert validate(p) == []

    def test_single_plank_all_literals(self):
        plank = Box(-0.5, -0.2, -0.8, 0.5, 0.2, 0.8)
        p = infer_attachments([plank], THRESH)
        assert all(not c.is_ref for c in p.planks[0].coords)
        assert resolve(p) == [plank]

    def test_faces_apart_no_attachment(self):
        panel = Box(-0.35, -0.23, -0.76, -0.34, 0.23, 0.76)
        shelf = Box(-0.34 + 2 * THRESH, -0.23, -0.70, 0.34, 0.23, -0.69)
        p = infer_attachments([panel, shelf], THRESH)
        assert not p.planks[1].coords[0].is_ref

    def test_geometry_reproduced_exactly(self):
        from conftest import make_programs

        for prog in make_programs(10, seed=3):
            boxes = resolve(prog)
            inferred = infer_attachments(boxes, THRESH)
            assert sorted(b.bounds() for b in resolve(inferred)) == sorted(
                b.bounds() for b in boxes
            )

    def test_inferred_attachments_opposite_side(self):
        from conftest import make_programs
        from plankforge.boxes import opposite_dof

        for prog in make_programs(10, seed=13):
            inferred = infer_attachments(resolve(prog), THRESH)
            for plank in inferred.planks:
                for d, coord in enumerate(plank.coords):
                    if coord.is_ref:
                        assert coord.ref[0] >= 1
                        assert coord.ref[1] == opposite_dof(d)

    def test_bbox_participation_flag(self):
        panel = Box(-0.35, -0.23, -0.76, -0.34, 0.23, 0.76)
        shelf = Box(-0.34, -0.23, -0.70, 0.34, 0.23, -0.69)
        p = infer_attachments([panel, shelf], THRESH, attach_bbox=True)
        # The panel hugs the hull: same-side references onto cuboid 0.
        assert p.planks[0].coords[0] == Coord.attach(0, 0)
        assert validate(p) == []
        assert sorted(b.bounds() for b in resolve(p)) == sorted(
            b.bounds() for b in [panel, shelf]
        )

    def test_nearest_target_wins(self):
        # Two parallel panels, one marginally nearer to the shelf's end.
        left_near = Box(-0.4, -0.2, -0.8, -0.3, 0.2, 0.8)
        left_far = Box(-0.6, -0.2, -0.8, -0.3 - 0.0005, 0.2, 0.8)
        shelf = Box(-0.2999, -0.2, -0.1, 0.3, 0.2, 0.0)
        p = infer_attachments([left_near, left_far, shelf], 0.01)
        # plane distances: 0.0001 to left_near.x_max, 0.0006 to left_far.x_max
        assert p.planks[2].coords[0] == Coord.attach(1, 3)

    def test_cycle_detected(self):
        a = Box(0.5, 0.0, -1.0, 0.6, 1.0, 1.0)  # thin in x
        b = Box(-1.0, -0.1, -0.5, 1.0, 0.0, 0.5)  # thin in y
        c = Box(0.6, -0.05, -0.6, 1.0, 0.8, -0.5)  # thin in z
        with pytest.raises(CyclicAttachmentError):
            infer_attachments([a, b, c], THRESH)
