import numpy as np
import pytest

from overlaymap.basemap import BasemapFormatError, build_basemap, load_basemap, parse_basemap
from overlaymap.layout import LayoutConfig
from overlaymap.matrix import CitationMatrix
from overlaymap.registry import from_names
from overlaymap.synthetic import block_citation_matrix, block_registry


@pytest.fixture(scope="module")
def desk_basemap(desk_inputs):
    reg, m = desk_inputs
    return build_basemap(m, reg, 0.15, 3, LayoutConfig(seed=3))


def test_desk_build(desk_basemap, desk_inputs):
    bm, layout, model, fa = desk_basemap
    assert bm.size == 30
    assert bm.n_factors == 3
    assert sorted(bm.factor_sizes()) == [10, 10, 10]
    assert layout.final_stress <= layout.initial_stress
    assert bm.provenance["input_hash"] == desk_inputs[1].content_hash()
    assert bm.provenance["layout_input"] == "thresholded-network"
    assert all(w > 0.15 for _, _, w in bm.network.edges)


def test_round_trip_is_bit_identical(desk_basemap, tmp_path):
    bm = desk_basemap[0]
    text = bm.serialize()
    again = parse_basemap(text)
    assert again.serialize() == text
    assert again.coordinates.tobytes() == bm.coordinates.tobytes()
    assert again.similarity.values.tobytes() == bm.similarity.values.tobytes()
    path = tmp_path / "b.basemap"
    path.write_text(text, encoding="utf-8")
    assert load_basemap(path).content_hash() == bm.content_hash()


def test_rebuild_is_deterministic(desk_inputs, desk_basemap):
    reg, m = desk_inputs
    again = build_basemap(m, reg, 0.15, 3, LayoutConfig(seed=3))[0]
    assert again.serialize() == desk_basemap[0].serialize()


def test_one_category():
    bm = build_basemap(CitationMatrix(np.array([[4]])), from_names(["ONLY"]), 0.15, 1)[0]
    assert bm.size == 1 and bm.n_factors == 1
    assert bm.coordinates.tolist() == [[0.0, 0.0]]
    assert bm.assignment == [0]
    assert parse_basemap(bm.serialize()).serialize() == bm.serialize()


def test_registry_aliases_survive(desk_basemap):
    bm = parse_basemap(desk_basemap[0].serialize())
    assert bm.registry.resolve("Biology 1") == 0


def test_size_mismatch():
    with pytest.raises(ValueError):
        build_basemap(CitationMatrix(np.eye(2, dtype=int)), from_names(["A", "B", "C"]))


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace("#overlaymap-basemap 1", "#something-else"),
        lambda t: t.replace("[edges]\n", ""),
        lambda t: t.rstrip("\n").rsplit("\n", 1)[0] + "\n",
    ],
)
def test_malformed(desk_basemap, mutate):
    with pytest.raises(BasemapFormatError):
        parse_basemap(mutate(desk_basemap[0].serialize()))


def test_full_scale_shape():
    # 221 categories grouped into 18 factors; the step cap is lowered to keep the suite quick
    sizes = [13] * 17
    reg, m = block_registry(sizes), block_citation_matrix(sizes, seed=5)
    bm, layout, _, fa = build_basemap(m, reg, 0.15, 18, LayoutConfig(max_steps=3000))
    assert bm.size == 221
    assert bm.n_factors == 18
    assert len(fa.assignment) == 221
    assert np.all(np.isfinite(bm.coordinates))
    assert layout.final_stress <= layout.initial_stress
