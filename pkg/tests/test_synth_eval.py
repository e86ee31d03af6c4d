import xml.etree.ElementTree as ET

import numpy as np
import pytest

from conftest import make_traj
from oracles import threshold_scan
from motion_translate.dtw import dtw_distance
from motion_translate.errors import InvalidParams
from motion_translate.evaluate import BLUE, RED, EvalReport, evaluate, render_svg, render_svg_text
from motion_translate.motion import XY
from motion_translate.synth import Degradation, StrokeParams, make_corpus, synth_expert, synth_nonexpert

SVG_NS = "{http://www.w3.org/2000/svg}"


def test_degenerate_path():
    params = StrokeParams(control_points=((0.01, 0.02), (0.01, 0.02)))
    traj = synth_expert(params)
    assert np.all(traj.values[:, 0] == 0.01) and np.all(traj.values[:, 1] == 0.02)
    assert np.all(traj.values[:, 3:5] == 0.0)
    assert traj.channel("fz").max() > 0.1


def test_expert_deterministic():
    assert synth_expert(StrokeParams(seed=3)) == synth_expert(StrokeParams(seed=3))


def test_default_force_profile():
    params = StrokeParams()
    traj = synth_expert(params)
    fz = traj.channel("fz")
    assert abs(fz.max() - params.force_peak_n) <= 0.01 * params.force_peak_n
    dipping = traj.channel("z") < params.pen_height_m
    assert np.mean(fz[dipping] > 0.1) >= 0.8
    assert np.all(fz >= 0)


def test_invalid_params():
    for bad in (dict(duration_s=0), dict(force_peak_n=-1), dict(control_points=()), dict(speed_profile="x")):
        with pytest.raises(InvalidParams):
            synth_expert(StrokeParams(**bad))
    with pytest.raises(InvalidParams):
        synth_nonexpert(StrokeParams(), Degradation(noise_amplitude_m=-1))
    with pytest.raises(InvalidParams):
        make_corpus(0, 1)


def test_null_degradation_is_expert():
    params = StrokeParams(seed=5)
    assert synth_nonexpert(params, Degradation.none()) == synth_expert(params)


def test_tempo_length():
    params = StrokeParams()
    traj = synth_nonexpert(params, Degradation(tempo=1.25))
    assert len(traj) == round(1.25 * params.n_samples)


def test_nonexpert_separates():
    params = StrokeParams()
    ex = synth_expert(params)
    ne = synth_nonexpert(params)
    assert dtw_distance(ex, ex, XY) == 0.0
    assert dtw_distance(ne, ex, XY) > 0.0


def test_nonexpert_force_weaker_and_untapered():
    params = StrokeParams()
    ex = synth_expert(params).channel("fz")
    ne = synth_nonexpert(params, Degradation(noise_amplitude_m=0.0, tempo=1.0)).channel("fz")
    assert ne.max() == pytest.approx(0.6 * ex.max(), rel=0.01)


def test_degradation_monotonic():
    params = StrokeParams(seed=11)
    ex = synth_expert(params)
    dists = [
        dtw_distance(synth_nonexpert(params, Degradation(noise_amplitude_m=a)), ex, XY)
        for a in np.linspace(0.0, 0.006, 10)
    ]
    assert all(b >= a for a, b in zip(dists, dists[1:])), dists


def test_corpus():
    ex, ne = make_corpus(1, 1)
    assert len(ex) == 1 and len(ne) == 1
    ex, ne = make_corpus(3, 6, seed=2)
    assert len(ex) == 3 and len(ne) == 6
    ex2, ne2 = make_corpus(3, 6, seed=2)
    assert all(a == b for a, b in zip(ex + ne, ex2 + ne2))
    ex3, _ = make_corpus(3, 6, seed=3)
    assert ex3[0] != ex[0]
    assert len({len(t) for t in ne}) > 1


# -------------------------------------------------------------- evaluation


def test_evaluate_identities():
    params = StrokeParams()
    ex = synth_expert(params)
    ne = synth_nonexpert(params)
    report = evaluate(ne, ex, ex)
    assert report.generated == (0.0,) * 6
    assert all(v > 0 for v in report.nonexpert)
    same = evaluate(ne, ne, ex)
    assert same.nonexpert == same.generated
    for c in range(6):
        assert report.nonexpert[c] == dtw_distance(ne, ex, [c])


def test_report_csv_round_trip():
    report = EvalReport((1.5, 2.0, 0.25, 3.0, 4.0, 5.0), (1.0, 1.0, 0.125, 2.0, 3.0, 4.0))
    text = report.to_csv()
    assert text.splitlines()[0] == "channel,nonexpert_dtw,generated_dtw"
    assert text.splitlines()[1] == "x,1.5,1"
    assert EvalReport.from_csv(text) == report
    assert "Fz" in report.to_table()


def _svg_colors(text):
    root = ET.fromstring(text.encode("utf-8"))
    assert root.tag == SVG_NS + "svg" and root.get("version") == "1.1"
    return [el.get("stroke") for el in root.iter(SVG_NS + "line")]


def test_svg_all_blue():
    values = np.zeros((20, 6))
    values[:, 0] = np.linspace(0, 0.05, 20)
    values[:, 5] = 0.05
    colors = _svg_colors(render_svg_text(make_traj(values)))
    assert colors == [BLUE] * 19


def test_svg_boundary_is_blue():
    values = np.zeros((4, 6))
    values[:, 0] = [0.0, 0.01, 0.02, 0.03]
    values[:, 5] = [0.1, 0.1000001, 0.0, 0.2]
    assert _svg_colors(render_svg_text(make_traj(values))) == [BLUE, RED, BLUE]


def test_svg_default_stroke_matches_scan(tmp_path):
    traj = synth_expert(StrokeParams())
    path = tmp_path / "stroke.svg"
    render_svg(traj, path)
    colors = _svg_colors(path.read_text())
    assert len(colors) == len(traj) - 1
    assert colors.count(RED) == threshold_scan(traj.channel("fz").tolist(), 0.1)
    assert colors.count(RED) + colors.count(BLUE) == len(colors)


def test_svg_viewbox_margin():
    values = np.zeros((3, 6))
    values[:, 0] = [0.0, 0.1, 0.2]
    values[:, 1] = [0.0, 0.4, 0.0]
    root = ET.fromstring(render_svg_text(make_traj(values)).encode("utf-8"))
    _, _, vw, vh = map(float, root.get("viewBox").split())
    xs = [float(el.get("x1")) for el in root.iter(SVG_NS + "line")]
    assert xs[0] == pytest.approx(vw * 0.05 / 1.1, rel=1e-3)
    assert vh == pytest.approx(2 * vw, rel=1e-3)
