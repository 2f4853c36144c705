"""Command-line interface tying the pipelines together over CSV/JSON files.

Exit codes: 0 on success, 2 for usage errors, 3 for data/argument
validation failures, 4 if an internal invariant breaks (a bug). Every
subcommand accepts ``--seed`` and ``--config`` (a JSON file of parameter
overrides) and writes a ``<output>.manifest.json`` describing inputs,
parameters, and versions beside its primary output.
"""
from __future__ import annotations

import argparse
import io as _stdio
import json
import os
import sys

import numpy as np

from . import __version__
from . import io as bfio
from .blink_detect import SearchParams, blink_prefilter, detect_peaks, segment_peak
from .attribution import background_mean, fit_ridge, mean_abs_shap, shapley_exact
from .cull_search import (
    CullConfig,
    apply_bounds,
    bfs_search,
    combination_sweep,
    evaluate,
    individual_search,
    individual_search_all,
)
from .eda_features import (
    extract_eda_features,
    tonic_phasic_split,
    window_series,
)
from .eog_features import extract_eog_features, feature_names
from .errors import (
    DataFormatError,
    DegenerateShapeError,
    InternalError,
    InvalidArgumentError,
    ToolkitError,
)
from .cull_search import FeatureRow, FeatureTable
from .signal_core import Channel, butterworth_lowpass, minmax_normalize, savitzky_golay
from .surveys import score_panas, score_stai_state
from .synth import (
    SynthSpec,
    make_blink_spec,
    make_eda_spec,
    make_wire_spec,
    synth_blink_session,
    synth_eda_session,
    synth_wire_session,
)

_fmt = bfio._fmt


def _thread_cap() -> int:
    raw = os.environ.get("BLINKFORGE_THREADS", "")
    if raw.strip():
        try:
            return max(1, int(raw))
        except ValueError:
            raise InvalidArgumentError(
                f"BLINKFORGE_THREADS must be an integer, got {raw!r}"
            ) from None
    return os.cpu_count() or 1


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as handle:
        try:
            obj = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise DataFormatError(f"{path}: config must be a JSON object")
    return obj


def _param(cli_value, config: dict, key: str, default):
    if cli_value is not None:
        return cli_value
    if key in config:
        return config[key]
    return default


def _search_params(args, config: dict) -> SearchParams:
    return SearchParams(
        prominence_min=_param(getattr(args, "prominence_min", None), config,
                              "prominence_min", 0.1),
        width_min_s=_param(getattr(args, "width_min_s", None), config,
                           "width_min_s", 0.04),
        width_max_s=_param(getattr(args, "width_max_s", None), config,
                           "width_max_s", 0.5),
        height_min=_param(getattr(args, "height_min", None), config,
                          "height_min", 0.05),
        baseline_window_s=_param(getattr(args, "baseline_window_s", None), config,
                                 "baseline_window_s", 0.5),
    )


def _manifest(args, command: str, parameters: dict, inputs: list[str],
              outputs: list[str]):
    bfio.write_manifest(
        primary_output=outputs[0],
        command=command,
        parameters=parameters,
        inputs=inputs,
        outputs=outputs,
        seed=getattr(args, "seed", None),
        version=__version__,
    )


def _split_names(text: str) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    if not names:
        raise InvalidArgumentError("expected a comma-separated name list")
    return names


# --------------------------------------------------------------------------
# subcommand implementations

def _cmd_filter(args) -> int:
    config = _load_config(args.config)
    rec = bfio.read_recording(args.infile)
    if rec.channel is Channel.EOG:
        order = int(_param(args.order, config, "order", 5))
        cutoff = float(_param(args.cutoff_hz, config, "cutoff_hz", 10.0))
    else:
        order = int(_param(args.order, config, "order", 1))
        cutoff = float(_param(args.cutoff_hz, config, "cutoff_hz", 1.0))
    zero_phase = not args.single_pass
    out = butterworth_lowpass(rec, order=order, cutoff_hz=cutoff,
                              zero_phase=zero_phase)
    savgol_window_s = float(_param(args.savgol_window_s, config,
                                   "savgol_window_s", 0.15))
    savgol_polyorder = int(_param(args.savgol_polyorder, config,
                                  "savgol_polyorder", 3))
    apply_savgol = rec.channel is Channel.EOG and not args.no_savgol
    if apply_savgol:
        window = int(round(savgol_window_s * rec.sample_rate_hz))
        if window % 2 == 0:
            window += 1
        window = max(window, savgol_polyorder + 1 + (savgol_polyorder % 2 == 0))
        if window % 2 == 0:
            window += 1
        out = savitzky_golay(out, window_samples=window, polyorder=savgol_polyorder)
    bfio.write_recording(args.out, out)
    _manifest(args, "filter", {
        "order": order, "cutoff_hz": cutoff, "zero_phase": zero_phase,
        "savgol": apply_savgol, "savgol_window_s": savgol_window_s,
        "savgol_polyorder": savgol_polyorder,
    }, [args.infile], [args.out])
    return 0


def _cmd_detect(args) -> int:
    config = _load_config(args.config)
    rec = bfio.read_recording(args.infile)
    params = _search_params(args, config)
    cands = blink_prefilter(detect_peaks(rec, params), params)
    segments = [segment_peak(rec, c, params) for c in cands]
    bfio.write_segments(args.out, segments, rec.sample_rate_hz)
    _manifest(args, "detect", {
        "prominence_min": params.prominence_min,
        "width_min_s": params.width_min_s,
        "width_max_s": params.width_max_s,
        "height_min": params.height_min,
        "baseline_window_s": params.baseline_window_s,
    }, [args.infile], [args.out])
    return 0


def _segments_for(args, rec, params):
    if args.segments:
        return bfio.read_segments(args.segments, rec), [args.segments]
    cands = blink_prefilter(detect_peaks(rec, params), params)
    return [segment_peak(rec, c, params) for c in cands], []


def _cmd_features_eog(args) -> int:
    config = _load_config(args.config)
    rec = bfio.read_recording(args.recording)
    params = _search_params(args, config)
    segments, extra_inputs = _segments_for(args, rec, params)
    normalize = not args.no_normalize
    label = None
    if args.label:
        label = args.label == bfio.LABEL_POSITIVE
    names = list(feature_names(normalize))
    rows = []
    skipped = 0
    for i, seg in enumerate(segments):
        if seg.edge_truncated and not args.include_truncated:
            skipped += 1
            continue
        try:
            feats = extract_eog_features(seg, normalize=normalize)
        except (DegenerateShapeError, ToolkitError):
            skipped += 1
            continue
        rows.append(FeatureRow(str(i), dict(feats.values), label))
    table = FeatureTable(names, rows)
    bfio.write_feature_table(args.out, table)
    if skipped:
        print(f"skipped {skipped} degenerate or truncated segments",
              file=sys.stderr)
    _manifest(args, "features eog", {
        "normalize": normalize, "label": args.label,
        "include_truncated": bool(args.include_truncated),
        "n_segments": len(segments), "n_rows": len(rows),
    }, [args.recording] + extra_inputs, [args.out])
    return 0


def _cmd_features_eda(args) -> int:
    config = _load_config(args.config)
    rec = bfio.read_recording(args.recording)
    source = _param(args.source, config, "source", "phasic")
    if source not in ("phasic", "filtered"):
        raise InvalidArgumentError("--source must be 'phasic' or 'filtered'")
    cutoff = float(_param(args.cutoff_hz, config, "cutoff_hz", 1.0))
    tonic_cutoff = float(_param(args.tonic_cutoff_hz, config,
                                "tonic_cutoff_hz", 0.05))
    window_s = float(_param(args.window_s, config, "window_s", 1.0))
    tonic, phasic = tonic_phasic_split(rec, cutoff_hz=cutoff,
                                       tonic_cutoff_hz=tonic_cutoff)
    basis = phasic if source == "phasic" else tonic.replace_samples(
        tonic.samples + phasic.samples)
    windows = window_series(basis, window_s=window_s)
    label = None
    if args.label:
        label = args.label == bfio.LABEL_POSITIVE
    rows = []
    skipped = 0
    for win in windows:
        feats = extract_eda_features(win, rec.sample_rate_hz)
        if feats.hjorth_degenerate:
            skipped += 1
            continue
        rows.append(FeatureRow(str(win.start_index), dict(feats.values), label))
    from .eda_features import EDA_FEATURE_NAMES
    table = FeatureTable(list(EDA_FEATURE_NAMES), rows)
    bfio.write_feature_table(args.out, table)
    if skipped:
        print(f"skipped {skipped} degenerate (constant) windows", file=sys.stderr)
    _manifest(args, "features eda", {
        "source": source, "cutoff_hz": cutoff, "tonic_cutoff_hz": tonic_cutoff,
        "window_s": window_s, "n_windows": len(windows), "n_rows": len(rows),
    }, [args.recording], [args.out])
    return 0


def _cmd_cull_individual(args) -> int:
    config = _load_config(args.config)
    table = bfio.read_feature_table(args.features_file)
    bins = int(_param(args.bins, config, "bins", 50))
    if args.feature:
        lower, upper, report = individual_search(table, args.feature, bins=bins)
        cfg = CullConfig({args.feature: (lower, upper)})
        report = evaluate(apply_bounds(table, cfg), table.labels())
    else:
        feats = _split_names(args.features) if args.features else None
        cfg, report = individual_search_all(table, feats, bins=bins)
    bfio.write_cull_config(args.out_config, cfg)
    bfio.write_eval_report(args.out_report, report)
    _manifest(args, "cull individual", {"bins": bins, "feature": args.feature,
                                        "features": args.features},
              [args.features_file], [args.out_config, args.out_report])
    return 0


def _cmd_cull_bfs(args) -> int:
    config = _load_config(args.config)
    table = bfio.read_feature_table(args.features_file)
    bins = int(_param(args.bins, config, "bins", 15))
    feats = _split_names(args.features)
    cfg, report = bfs_search(table, feats, bins=bins)
    bfio.write_cull_config(args.out_config, cfg)
    bfio.write_eval_report(args.out_report, report)
    _manifest(args, "cull bfs", {"bins": bins, "features": feats},
              [args.features_file], [args.out_config, args.out_report])
    return 0


def _cmd_cull_apply(args) -> int:
    table = bfio.read_feature_table(args.features_file)
    cfg = bfio.read_cull_config(args.cull_config)
    preds = apply_bounds(table, cfg)
    outputs = []
    if args.out_predictions:
        buf = _stdio.StringIO()
        buf.write("id,prediction\n")
        for row, pred in zip(table.rows, preds):
            buf.write(f"{row.id},"
                      f"{bfio.LABEL_POSITIVE if pred else bfio.LABEL_NEGATIVE}\n")
        bfio._atomic_write_text(args.out_predictions, buf.getvalue())
        outputs.append(args.out_predictions)
    report = None
    if table.has_labels():
        report = evaluate(preds, table.labels())
        bfio.write_eval_report(args.out_report, report)
        outputs.insert(0, args.out_report)
    elif args.out_report:
        raise InvalidArgumentError(
            "cannot write an evaluation report: the table has no labels"
        )
    if not outputs:
        raise InvalidArgumentError(
            "nothing to do: pass --out-report and/or --out-predictions"
        )
    _manifest(args, "cull apply", {"n_rows": len(table)},
              [args.features_file, args.cull_config], outputs)
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args.config)
    table = bfio.read_feature_table(args.features_file)
    bins = int(_param(args.bins, config, "bins", 15))
    k = int(_param(args.k, config, "k", 5))
    candidates = _split_names(args.candidates) if args.candidates else None
    results = combination_sweep(table, k=k, candidates=candidates, bins=bins,
                                max_workers=_thread_cap())
    buf = _stdio.StringIO()
    buf.write("rank,features,accuracy,f1,tp,fp,tn,fn,config_json\n")
    for rank, (subset, cfg, report) in enumerate(results, start=1):
        cfg_json = json.dumps(cfg.to_jsonable(), sort_keys=True)
        buf.write(",".join([
            str(rank),
            '"' + ";".join(subset) + '"',
            _fmt(report.accuracy),
            _fmt(report.f1),
            str(report.tp), str(report.fp), str(report.tn), str(report.fn),
            '"' + cfg_json.replace('"', '""') + '"',
        ]) + "\n")
    bfio._atomic_write_text(args.out, buf.getvalue())
    _manifest(args, "sweep", {"bins": bins, "k": k, "candidates": candidates},
              [args.features_file], [args.out])
    return 0


def _cmd_shapley(args) -> int:
    config = _load_config(args.config)
    table = bfio.read_feature_table(args.features_file,
                                    require_known_names=False)
    feats = _split_names(args.features)
    target = args.target
    if target not in table.feature_names:
        raise InvalidArgumentError(
            f"target column {target!r} not found in the table"
        )
    lam = float(_param(args.lam, config, "lam", 0.0))
    X = table.matrix(feats)
    y = table.matrix([target])[:, 0]
    model = fit_ridge(X, y, lam=lam)

    def predict(vec):
        return model.predict_one(vec)

    background = background_mean(X, feats)
    reports = []
    buf = _stdio.StringIO()
    buf.write("instance_id,feature,phi,feature_value\n")
    for row in table.rows:
        instance = {f: row.values[f] for f in feats}
        rep = shapley_exact(predict, instance, background, feats)
        reports.append(rep)
        for f in feats:
            buf.write(f"{row.id},{f},{_fmt(rep.phi[f])},{_fmt(row.values[f])}\n")
    bfio._atomic_write_text(args.out, buf.getvalue())
    outputs = [args.out]
    if args.summary:
        means = mean_abs_shap(reports)
        sbuf = _stdio.StringIO()
        sbuf.write("feature,mean_abs_phi\n")
        for f in feats:
            sbuf.write(f"{f},{_fmt(means[f])}\n")
        bfio._atomic_write_text(args.summary, sbuf.getvalue())
        outputs.append(args.summary)
    _manifest(args, "shapley", {"features": feats, "target": target, "lam": lam},
              [args.features_file], outputs)
    return 0


def _cmd_survey_score(args) -> int:
    responses = bfio.read_survey_responses(args.infile)
    roster = args.stai_roster
    buf = _stdio.StringIO()
    buf.write("participant_id,stage,positive_affect,negative_affect,stai_state\n")
    for (pid, stage), resp in responses.items():
        pa, na = score_panas(resp)
        stai = score_stai_state(resp, roster=roster)
        buf.write(f"{pid},{stage},{pa},{na},{stai}\n")
    bfio._atomic_write_text(args.out, buf.getvalue())
    _manifest(args, "survey score", {"stai_roster": roster},
              [args.infile], [args.out])
    return 0


def _write_truth(path: str, truth):
    buf = _stdio.StringIO()
    buf.write("kind,time_s,index,amplitude\n")
    for ev in truth:
        buf.write(f"{ev.kind},{_fmt(ev.time_s)},{ev.index},{_fmt(ev.amplitude)}\n")
    bfio._atomic_write_text(path, buf.getvalue())


def _cmd_synth(args) -> int:
    config = _load_config(args.config)
    seed = args.seed if args.seed is not None else 0
    duration = float(_param(args.duration_s, config, "duration_s", 60.0))
    fs = float(_param(args.fs, config, "sample_rate_hz", 100.0))
    noise = _param(args.noise_sigma, config, "noise_sigma", None)
    if args.spec_json:
        with open(args.spec_json) as handle:
            spec = SynthSpec.from_jsonable(json.load(handle))
        inputs = [args.spec_json]
    else:
        inputs = []
        if args.kind == "blink":
            rate = float(_param(args.rate_hz, config, "rate_hz", 0.56))
            spec = make_blink_spec(seed, duration, sample_rate_hz=fs,
                                   rate_hz=rate,
                                   noise_sigma=0.005 if noise is None else noise)
        elif args.kind == "wire":
            rate = float(_param(args.rate_hz, config, "rate_hz", 2.8))
            spec = make_wire_spec(seed, duration, sample_rate_hz=fs,
                                  rate_hz=rate,
                                  noise_sigma=0.005 if noise is None else noise)
        else:
            n_scrs = int(_param(args.n_scrs, config, "n_scrs", 5))
            spec = make_eda_spec(seed, duration, sample_rate_hz=fs,
                                 n_scrs=n_scrs,
                                 noise_sigma=0.002 if noise is None else noise)
    outputs = [args.out]
    if args.kind == "blink":
        rec, truth = synth_blink_session(spec)
    elif args.kind == "wire":
        rec, truth = synth_wire_session(spec)
    else:
        rec, truth = synth_eda_session(spec), [
            e for e in spec.events if e.kind == "scr"
        ]
    bfio.write_recording(args.out, rec)
    if args.truth:
        if args.kind == "eda":
            buf = _stdio.StringIO()
            buf.write("kind,time_s,index,amplitude\n")
            for ev in truth:
                buf.write(f"{ev.kind},{_fmt(ev.time_s)},"
                          f"{int(round(ev.time_s * fs))},{_fmt(ev.amplitude)}\n")
            bfio._atomic_write_text(args.truth, buf.getvalue())
        else:
            _write_truth(args.truth, truth)
        outputs.append(args.truth)
    _manifest(args, f"synth {args.kind}", {
        "duration_s": spec.duration_s, "sample_rate_hz": spec.sample_rate_hz,
        "noise_sigma": spec.noise_sigma, "n_events": len(spec.events),
    }, inputs, outputs)
    return 0


def _cmd_plotdata(args) -> int:
    config = _load_config(args.config)
    if args.view == "peaks":
        rec = bfio.read_recording(args.recording)
        params = _search_params(args, config)
        segments, extra = _segments_for(args, rec, params)
        buf = _stdio.StringIO()
        header = "peak_id,t_rel_s,value"
        if args.label:
            header += ",label"
        buf.write(header + "\n")
        fs = rec.sample_rate_hz
        for i, seg in enumerate(segments):
            norm = minmax_normalize(seg.slice)
            center = seg.center_offset
            for j, v in enumerate(norm):
                line = f"{i},{_fmt((j - center) / fs)},{_fmt(v)}"
                if args.label:
                    line += f",{args.label}"
                buf.write(line + "\n")
        bfio._atomic_write_text(args.out, buf.getvalue())
        _manifest(args, "plotdata peaks", {"n_peaks": len(segments)},
                  [args.recording] + extra, [args.out])
    elif args.view == "culling":
        table = bfio.read_feature_table(args.features_file)
        cfg = bfio.read_cull_config(args.cull_config)
        labels = table.labels() if table.has_labels() else None
        alive = np.ones(len(table), dtype=bool)
        buf = _stdio.StringIO()
        if labels is not None:
            buf.write("step,feature,lower,upper,"
                      "retained_blink_fraction,retained_artifact_fraction\n")
        else:
            buf.write("step,feature,lower,upper,retained_fraction\n")
        mat = table.matrix(list(cfg.bounds))
        for step, (name, (lo, hi)) in enumerate(cfg.bounds.items(), start=1):
            col = mat[:, step - 1]
            alive &= (col >= lo) & (col <= hi)
            if labels is not None:
                pos = max(int(labels.sum()), 1)
                neg = max(int((~labels).sum()), 1)
                buf.write(f"{step},{name},{_fmt(lo)},{_fmt(hi)},"
                          f"{_fmt(int((alive & labels).sum()) / pos)},"
                          f"{_fmt(int((alive & ~labels).sum()) / neg)}\n")
            else:
                buf.write(f"{step},{name},{_fmt(lo)},{_fmt(hi)},"
                          f"{_fmt(int(alive.sum()) / len(table))}\n")
        bfio._atomic_write_text(args.out, buf.getvalue())
        _manifest(args, "plotdata culling", {"n_steps": len(cfg.bounds)},
                  [args.features_file, args.cull_config], [args.out])
    else:
        responses = bfio.read_survey_responses(args.infile)
        buf = _stdio.StringIO()
        buf.write("participant_id,stage,measure,score\n")
        for (pid, stage), resp in responses.items():
            pa, na = score_panas(resp)
            stai = score_stai_state(resp, roster=args.stai_roster)
            buf.write(f"{pid},{stage},positive_affect,{pa}\n")
            buf.write(f"{pid},{stage},negative_affect,{na}\n")
            buf.write(f"{pid},{stage},stai_state,{stai}\n")
        bfio._atomic_write_text(args.out, buf.getvalue())
        _manifest(args, "plotdata survey", {"stai_roster": args.stai_roster},
                  [args.infile], [args.out])
    return 0


# --------------------------------------------------------------------------
# parser

def _add_common(p):
    p.add_argument("--seed", type=int, default=None,
                   help="seed recorded in the manifest; drives synth")
    p.add_argument("--config", default=None,
                   help="JSON file of parameter overrides")


def _add_detect_params(p):
    p.add_argument("--prominence-min", dest="prominence_min", type=float)
    p.add_argument("--width-min-s", dest="width_min_s", type=float)
    p.add_argument("--width-max-s", dest="width_max_s", type=float)
    p.add_argument("--height-min", dest="height_min", type=float)
    p.add_argument("--baseline-window-s", dest="baseline_window_s", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blinkforge",
        description="EOG blink identification and EDA stress-feature toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filter", help="low-pass and smooth a recording")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--order", type=int)
    p.add_argument("--cutoff-hz", dest="cutoff_hz", type=float)
    p.add_argument("--single-pass", action="store_true",
                   help="causal filtering instead of zero-phase")
    p.add_argument("--no-savgol", action="store_true")
    p.add_argument("--savgol-window-s", dest="savgol_window_s", type=float)
    p.add_argument("--savgol-polyorder", dest="savgol_polyorder", type=int)
    _add_common(p)
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("detect", help="detect, prefilter, and segment peaks")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    _add_detect_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_detect)

    feats = sub.add_parser("features", help="extract feature tables")
    fsub = feats.add_subparsers(dest="modality", required=True)

    p = fsub.add_parser("eog", help="per-blink features")
    p.add_argument("--recording", required=True)
    p.add_argument("--segments", help="segments CSV from 'detect'")
    p.add_argument("--out", required=True)
    p.add_argument("--no-normalize", action="store_true",
                   help="keep raw amplitudes (adds Signal Height)")
    p.add_argument("--label", choices=[bfio.LABEL_POSITIVE, bfio.LABEL_NEGATIVE])
    p.add_argument("--include-truncated", action="store_true")
    _add_detect_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_features_eog)

    p = fsub.add_parser("eda", help="per-window conductance features")
    p.add_argument("--recording", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--source", choices=["phasic", "filtered"])
    p.add_argument("--cutoff-hz", dest="cutoff_hz", type=float)
    p.add_argument("--tonic-cutoff-hz", dest="tonic_cutoff_hz", type=float)
    p.add_argument("--window-s", dest="window_s", type=float)
    p.add_argument("--label", choices=[bfio.LABEL_POSITIVE, bfio.LABEL_NEGATIVE])
    _add_common(p)
    p.set_defaults(func=_cmd_features_eda)

    cull = sub.add_parser("cull", help="bound search and culling")
    csub = cull.add_subparsers(dest="mode", required=True)

    p = csub.add_parser("individual", help="two-phase per-feature scan")
    p.add_argument("--features-file", required=True)
    p.add_argument("--feature", help="optimize a single feature")
    p.add_argument("--features", help="comma-separated list to compile")
    p.add_argument("--bins", type=int)
    p.add_argument("--out-config", required=True)
    p.add_argument("--out-report", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_cull_individual)

    p = csub.add_parser("bfs", help="exhaustive grid traversal")
    p.add_argument("--features-file", required=True)
    p.add_argument("--features", required=True,
                   help="comma-separated feature names")
    p.add_argument("--bins", type=int)
    p.add_argument("--out-config", required=True)
    p.add_argument("--out-report", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_cull_bfs)

    p = csub.add_parser("apply", help="apply a culling config")
    p.add_argument("--features-file", required=True)
    p.add_argument("--cull-config", dest="cull_config", required=True)
    p.add_argument("--out-report")
    p.add_argument("--out-predictions")
    _add_common(p)
    p.set_defaults(func=_cmd_cull_apply)

    p = sub.add_parser("sweep", help="bound search over every feature k-subset")
    p.add_argument("--features-file", required=True)
    p.add_argument("--candidates", help="comma-separated candidate pool")
    p.add_argument("--k", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("shapley", help="exact per-instance attributions")
    p.add_argument("--features-file", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--lam", type=float)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", help="also write mean |phi| per feature")
    _add_common(p)
    p.set_defaults(func=_cmd_shapley)

    survey = sub.add_parser("survey", help="questionnaire scoring")
    ssub = survey.add_subparsers(dest="mode", required=True)
    p = ssub.add_parser("score")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stai-roster", choices=["standard", "abbreviated"],
                   default="standard")
    _add_common(p)
    p.set_defaults(func=_cmd_survey_score)

    synth = sub.add_parser("synth", help="generate synthetic recordings")
    p = synth
    p.add_argument("kind", choices=["blink", "wire", "eda"])
    p.add_argument("--out", required=True)
    p.add_argument("--truth", help="also write the event ground truth CSV")
    p.add_argument("--duration-s", dest="duration_s", type=float)
    p.add_argument("--fs", type=float)
    p.add_argument("--rate-hz", dest="rate_hz", type=float)
    p.add_argument("--n-scrs", dest="n_scrs", type=int)
    p.add_argument("--noise-sigma", dest="noise_sigma", type=float)
    p.add_argument("--spec-json", dest="spec_json",
                   help="full event plan as JSON (overrides the flags)")
    _add_common(p)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("plotdata", help="tidy CSVs for external plotting")
    p.add_argument("view", choices=["peaks", "culling", "survey"])
    p.add_argument("--recording")
    p.add_argument("--segments")
    p.add_argument("--features-file")
    p.add_argument("--cull-config", dest="cull_config")
    p.add_argument("--in", dest="infile")
    p.add_argument("--label", choices=[bfio.LABEL_POSITIVE, bfio.LABEL_NEGATIVE])
    p.add_argument("--stai-roster", choices=["standard", "abbreviated"],
                   default="standard")
    p.add_argument("--out", required=True)
    _add_detect_params(p)
    _add_common(p)
    p.set_defaults(func=_cmd_plotdata)

    return parser


def _check_plotdata_args(args, parser):
    required = {
        "peaks": ["recording"],
        "culling": ["features_file", "cull_config"],
        "survey": ["infile"],
    }[args.view]
    for name in required:
        if getattr(args, name) is None:
            parser.error(
                f"plotdata {args.view} requires --{name.replace('_', '-')}"
                .replace("--infile", "--in")
            )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "plotdata":
        _check_plotdata_args(args, parser)
    try:
        return args.func(args)
    except (InternalError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
