"""Turn a dataclass config into command-line flags (one flag per field)."""

import argparse
import dataclasses
import json
from pathlib import Path


def _parse_tuple(text):
    return tuple(float(t) for t in text.split(",") if t.strip())


def parse_config(cls, argv=None):
    parser = argparse.ArgumentParser(description=(cls.__doc__ or "").strip().splitlines()[0])
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        kind = _parse_tuple if isinstance(default, tuple) else type(default)
        parser.add_argument(f"--{f.name.replace('_', '-')}", dest=f.name, type=kind, default=default)
    return cls(**vars(parser.parse_args(argv)))


def save_rows(rows, out_dir, name, cfg):
    """Write rows as CSV next to a JSON dump of the config that produced them."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.csv"
    cols = list(rows[0])
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(format(v, ".17g") if isinstance(v, float) else str(v) for v in r.values()) + "\n")
    (out / f"{name}.config.json").write_text(json.dumps(dataclasses.asdict(cfg), indent=2) + "\n")
    return path
