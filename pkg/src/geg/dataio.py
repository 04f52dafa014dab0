"""Price ingestion, run configuration files and result serialization.

Price files are CSV with a header row: the first column holds period labels
(integers, ISO dates or any strictly increasing strings), the remaining
columns one asset each.  Missing or nonpositive prices are hard errors.

Run configuration files are flat ``section.key = value`` lines with ``#``
comments; see :data:`CONFIG_KEYS` for the key set and defaults.
"""

import csv
import datetime as dt
import hashlib
import io
import math
import os
import shutil
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .deform import DeformParams
from .errors import ConfigError, DataError, DomainError
from .mirror import LearningRate
from .olps import BacktestResult, PriceSeries, SparsifyRule, StrategyConfig
from .search import HyperSpace, Interval, SearchResult, SplitScheme

__all__ = [
    "DatasetManifest",
    "RunConfig",
    "SearchBlock",
    "CONFIG_KEYS",
    "load_prices",
    "write_prices",
    "load_config",
    "parse_config",
    "write_results",
    "read_weights",
    "fmt",
]


def fmt(value):
    """12-significant-digit text for floats, plain str otherwise."""
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


# -- prices -----------------------------------------------------------------

@dataclass(frozen=True)
class DatasetManifest:
    source: str
    n_assets: int
    n_periods: int
    first_label: str
    last_label: str
    sha256: str

    def verify(self):
        """True if the file on disk still has the recorded checksum."""
        return hashlib.sha256(Path(self.source).read_bytes()).hexdigest() == self.sha256


def _label_keys(labels):
    for parse in (int, dt.date.fromisoformat, dt.datetime.fromisoformat):
        try:
            return [parse(s) for s in labels]
        except ValueError:
            continue
    return list(labels)


def load_prices(path, fmt="csv"):
    """Parse a price table into a validated PriceSeries (with manifest)."""
    if fmt != "csv":
        raise DataError(f"unsupported price format {fmt!r}")
    path = Path(path)
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc})") from exc

    reader = csv.reader(io.StringIO(text))
    header = None
    labels, rows, lines = [], [], []
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if header is None:
            header = [c.strip() for c in row]
            if len(header) < 3:
                raise DataError(f"{path}:{lineno}: need a label column and at least 2 asset columns")
            continue
        if len(row) != len(header):
            raise DataError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        values = []
        for col, cell in zip(header[1:], row[1:]):
            cell = cell.strip()
            if not cell:
                raise DataError(f"{path}:{lineno}: missing value for {col!r}")
            try:
                v = float(cell)
            except ValueError:
                raise DataError(f"{path}:{lineno}: cannot parse {cell!r} in column {col!r}") from None
            if not (math.isfinite(v) and v > 0):
                raise DataError(
                    f"{path}:{lineno}: price {cell!r} in column {col!r} (row {len(rows)}) "
                    "must be strictly positive"
                )
            values.append(v)
        labels.append(row[0].strip())
        rows.append(values)
        lines.append(lineno)
    if header is None:
        raise DataError(f"{path}: empty file")

    keys = _label_keys(labels)
    for i in range(1, len(keys)):
        if not keys[i - 1] < keys[i]:
            kind = "duplicate" if keys[i - 1] == keys[i] else "out-of-order"
            raise DataError(f"{path}:{lines[i]}: {kind} period label {labels[i]!r}")

    manifest = DatasetManifest(
        source=str(path),
        n_assets=len(header) - 1,
        n_periods=len(rows),
        first_label=labels[0] if labels else "",
        last_label=labels[-1] if labels else "",
        sha256=hashlib.sha256(raw).hexdigest(),
    )
    return PriceSeries(np.array(rows, dtype=float), tuple(labels), tuple(header[1:]), manifest)


def write_prices(path, series, label_header="period"):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow([label_header, *series.assets])
        for label, row in zip(series.labels, series.prices):
            out.writerow([label, *(fmt(v) for v in row)])


# -- configuration ----------------------------------------------------------

def _to_bool(s):
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _optional(conv):
    def parse(s):
        return None if s.strip().lower() in ("", "none") else conv(s)
    return parse


def _axis(conv):
    """Comma-separated list, or uniform(lo, hi) / loguniform(lo, hi)."""
    def parse(s):
        s = s.strip()
        for prefix, log in (("uniform(", False), ("loguniform(", True)):
            if s.startswith(prefix) and s.endswith(")"):
                lo, hi = (float(v) for v in s[len(prefix):-1].split(","))
                return Interval(lo, hi, log)
        return tuple(conv(v.strip()) for v in s.split(",") if v.strip())
    return parse


_SPACE = HyperSpace()

# key -> (parser, default).  A default of None means "unset".
CONFIG_KEYS = {
    "dataset.path": (str, None),
    "dataset.format": (str, "csv"),
    "deform.kind": (str, "general"),
    "deform.param": (_optional(float), None),
    "deform.a": (float, 0.0),
    "deform.b": (float, 0.0),
    "loss.q": (float, 1.0),
    "lr.eta": (float, 0.05),
    "lr.gamma": (float, 0.0),
    "lr.schedule": (str, "scalar"),
    "lr.negative_cap": (float, 1.0),
    "update.centering": (str, "weighted"),
    "update.projection": (str, "l1"),
    "preprocess.mode": (str, "raw"),
    "preprocess.window": (int, 5),
    "sparsify.rule": (str, "none"),
    "sparsify.param": (_optional(float), None),
    "backtest.initial_wealth": (float, 1.0),
    "baselines.eta": (float, 0.05),
    "output.dir": (str, "out"),
    "run.seed": (int, 0),
    "search.method": (str, "grid"),
    "search.samples": (int, 50),
    "search.objective": (str, "mean_wealth"),
    "search.jobs": (int, 1),
    "search.a": (_axis(float), _SPACE.a),
    "search.b": (_axis(float), _SPACE.b),
    "search.q": (_axis(float), _SPACE.q),
    "search.eta": (_axis(float), _SPACE.eta),
    "search.gamma": (_axis(float), _SPACE.gamma),
    "search.schedule": (_axis(str), _SPACE.schedule),
    "search.centering": (_axis(str), _SPACE.centering),
    "search.projection": (_axis(str), _SPACE.projection),
    "search.preprocessing": (_axis(str), _SPACE.preprocessing),
    "search.window": (_axis(int), _SPACE.window),
    "split.train": (_optional(int), None),
    "split.test": (_optional(int), None),
    "split.folds": (_optional(int), None),
    "split.anchored": (_to_bool, False),
}


@dataclass(frozen=True)
class SearchBlock:
    method: str
    space: HyperSpace
    scheme: SplitScheme
    samples: int
    objective: str
    jobs: int


@dataclass(frozen=True)
class RunConfig:
    dataset_path: Path
    dataset_format: str
    strategy: StrategyConfig
    initial_wealth: float
    baseline_eta: float
    output_dir: Path
    seed: int
    search: SearchBlock
    effective: dict

    def echo(self):
        """``key = value`` lines for every effective setting, defaults included."""
        return [f"{k} = {_echo_value(v)}" for k, v in self.effective.items()]


def _echo_value(v):
    if isinstance(v, Interval):
        return f"{'loguniform' if v.log else 'uniform'}({fmt(v.low)}, {fmt(v.high)})"
    if isinstance(v, tuple):
        return ", ".join(fmt(x) for x in v)
    if v is None:
        return "none"
    return fmt(v)


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent, source=str(path))


def parse_config(text, base_dir=".", source="<config>"):
    given = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'section.key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in given:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        parser = CONFIG_KEYS[key][0]
        try:
            given[key] = parser(value)
        except (ValueError, DomainError) as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {exc}") from None

    eff = {k: given.get(k, default) for k, (_, default) in CONFIG_KEYS.items()}
    if eff["dataset.path"] is None:
        raise ConfigError(f"{source}: dataset.path is required")

    try:
        strategy = _strategy_from(eff, given)
        search = _search_from(eff, given)
        if eff["backtest.initial_wealth"] <= 0:
            raise DomainError("backtest.initial_wealth must be positive")
    except DomainError as exc:
        raise ConfigError(f"{source}: invariant violated: {exc}") from None

    # echo the deformation actually in effect
    eff["deform.a"], eff["deform.b"] = strategy.deform.a, strategy.deform.b
    dataset = Path(eff["dataset.path"])
    if not dataset.is_absolute():
        dataset = Path(base_dir) / dataset
    return RunConfig(
        dataset_path=dataset,
        dataset_format=eff["dataset.format"],
        strategy=strategy,
        initial_wealth=eff["backtest.initial_wealth"],
        baseline_eta=eff["baselines.eta"],
        output_dir=Path(eff["output.dir"]),
        seed=eff["run.seed"],
        search=search,
        effective=eff,
    )


def _strategy_from(eff, given):
    kind = eff["deform.kind"]
    if kind == "general":
        deform = DeformParams(eff["deform.a"], eff["deform.b"])
    else:
        if "deform.a" in given or "deform.b" in given:
            raise DomainError("set either deform.kind or deform.a/deform.b, not both")
        deform = DeformParams.from_kind(kind, eff["deform.param"])
    return StrategyConfig(
        deform=deform,
        q=eff["loss.q"],
        lr=LearningRate(eff["lr.eta"], eff["lr.gamma"], eff["lr.schedule"], eff["lr.negative_cap"]),
        centering=eff["update.centering"],
        projection=eff["update.projection"],
        preprocessing=eff["preprocess.mode"],
        window=eff["preprocess.window"],
        sparsify=_sparsify_rule(eff),
    )


def _sparsify_rule(eff):
    rule, param = eff["sparsify.rule"], eff["sparsify.param"]
    if rule == "topk" and param is not None and float(param).is_integer():
        param = int(param)
    return SparsifyRule(rule, param)


def _search_from(eff, given):
    if not any(k.startswith(("search.", "split.")) for k in given):
        return None
    if eff["search.method"] not in ("grid", "random"):
        raise DomainError("search.method must be 'grid' or 'random'")
    if eff["split.train"] is None or eff["split.test"] is None:
        raise DomainError("a search block needs split.train and split.test")
    space = HyperSpace(
        a=eff["search.a"], b=eff["search.b"], q=eff["search.q"], eta=eff["search.eta"],
        gamma=eff["search.gamma"], schedule=eff["search.schedule"],
        centering=eff["search.centering"], projection=eff["search.projection"],
        preprocessing=eff["search.preprocessing"], window=eff["search.window"],
        sparsify=_sparsify_rule(eff),
        negative_cap=eff["lr.negative_cap"],
    )
    scheme = SplitScheme(eff["split.train"], eff["split.test"], eff["split.folds"], eff["split.anchored"])
    return SearchBlock(eff["search.method"], space, scheme, eff["search.samples"],
                       eff["search.objective"], eff["search.jobs"])


# -- results ----------------------------------------------------------------

def _csv_text(header, rows):
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(header)
    for row in rows:
        out.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _backtest_files(result, echo):
    wealth = _csv_text(
        ["period", "return", "wealth"],
        ([lab, float(r), float(w)] for lab, r, w in zip(result.labels, result.returns, result.wealth)),
    )
    weights = _csv_text(
        ["period", *result.assets],
        ([lab, *(float(v) for v in row)] for lab, row in zip(result.labels, result.weights)),
    )
    lines = [f"strategy = {result.name}"]
    lines += [f"{k} = {fmt(v)}" for k, v in result.metrics().items()]
    if result.config is not None:
        lines.append("")
        lines += [f"strategy.{k} = {_echo_value(v)}" for k, v in result.config.as_dict().items()]
    if echo:
        lines.append("")
        lines += list(echo)
    return {"wealth.csv": wealth, "weights.csv": weights, "summary.txt": "\n".join(lines) + "\n"}


def _search_files(result, echo):
    header = ["rank", *HyperSpace.AXES, "score", "fold_wealth", "error"]
    rows = []
    for rank, ev in enumerate(result.ranking, start=1):
        rows.append([rank, *(ev.point[n] for n in HyperSpace.AXES), float(ev.score),
                     ";".join(fmt(float(v)) for v in ev.fold_wealth), ev.error or ""])
    best = result.best
    lines = [
        f"method = {result.method}",
        f"objective = {result.objective}",
        f"evaluated = {result.evaluated}",
        f"invalid = {result.invalid}",
        f"folds = {len(result.splits)}",
    ]
    lines += [f"fold{i}.train = [{tr.start}, {tr.stop})  test = [{te.start}, {te.stop})"
              for i, (tr, te) in enumerate(result.splits)]
    lines += [f"best.{n} = {fmt(best.point[n])}" for n in HyperSpace.AXES]
    lines.append(f"best.score = {fmt(float(best.score))}")
    if echo:
        lines.append("")
        lines += list(echo)
    return {"ranking.csv": _csv_text(header, rows), "summary.txt": "\n".join(lines) + "\n"}


def write_results(result, directory, echo=None):
    """Write result files atomically into ``directory``; returns their paths.

    A BacktestResult yields wealth.csv, weights.csv and summary.txt; a
    SearchResult yields ranking.csv and summary.txt.  Files are rendered in
    memory and staged in a temporary directory before being renamed into
    place, so a failure leaves no partial output.
    """
    if isinstance(result, BacktestResult):
        files = _backtest_files(result, echo)
    elif isinstance(result, SearchResult):
        files = _search_files(result, echo)
    else:
        raise TypeError(f"cannot write {type(result).__name__}")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=directory))
    try:
        for name, text in files.items():
            with open(staging / name, "w", newline="") as fh:
                fh.write(text)
        paths = []
        for name in files:
            os.replace(staging / name, directory / name)
            paths.append(directory / name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    return paths


def read_weights(path):
    """Read weights.csv back as (labels, assets, matrix)."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assets = tuple(rows[0][1:])
    labels = tuple(r[0] for r in rows[1:])
    matrix = np.array([[float(v) for v in r[1:]] for r in rows[1:]], dtype=float)
    return labels, assets, matrix
