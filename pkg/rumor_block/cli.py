'''
Command line: generate, run, evaluate, experiment
'''

import os
import io
import sys
import logging
import argparse
import dataclasses
import pandas as pd
from rumor_block.helpers import (
    NS_CELL, NS_EVALUATE, GuardError, check_disjoint, derive_seed, timed
)
from rumor_block.parsers import (
    parse_config_lines, parse_count, parse_int_list, parse_label_lines, parse_names
)
from rumor_block.graph import (
    WeightingModel, degree_top_k, generate_power_law, load_edge_list, write_edge_list
)
from rumor_block.rbr import (
    DEFAULT_MAX_TUPLES, RbrParams, evaluate_many, evaluate_monte_carlo, evaluate_on,
    evaluate_tuples, format_report, report_row, run_rbr,
)
from rumor_block.rtuple import cached_sample_set
from rumor_block.baselines import ALGORITHMS, DEFAULT_SIMULATIONS, BaselineKind, run_baseline

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_GUARD = 3

LOG_FORMAT = '%(asctime)s |%(levelname)s: %(message)s'

CSV_COLUMNS = [
    'dataset', 'model', 'algo', 'k', 'f_estimate', 'f_stderr',
    'tuples_used', 'wall_ms', 'master_seed',
]
SEEDS_COLUMNS = ['dataset', 'model', 'algo', 'k', 'tuples_used', 'seeds']

DEFAULT_EVAL_TUPLES = 1000000
DEFAULT_MC_TRIALS = 2000

class ArgumentParser(argparse.ArgumentParser):
    ''' argparse parser whose usage errors exit with EXIT_USAGE '''

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{prog}: error: {msg}\n'.format(prog=self.prog, msg=message))

def load_dataset(spec, model):
    ''' A Graph from an edge-list path or 'powerlaw:<n>:<avg_deg>[:<exponent>[:<seed>]]'

    Raises
    ------
    ValueError on a malformed generator spec
    RuntimeError / OSError from the edge-list loader
    '''
    if not spec.startswith('powerlaw:'):
        return load_edge_list(spec, model)
    parts = spec.split(':')[1:]
    if not 2 <= len(parts) <= 4:
        raise ValueError(
            "Expected powerlaw:<n>:<avg_deg>[:<exponent>[:<seed>]], got {s!r}".format(s=spec)
        )
    n, avg = parse_count(parts[0]), float(parts[1])
    exponent = float(parts[2]) if len(parts) > 2 else 2.5
    seed = int(parts[3]) if len(parts) > 3 else 0
    return generate_power_law(n, avg, exponent, seed, model)

def resolve_rumors(g, count, rumor_file=None, direction='out'):
    ''' Rumor seeds: labels listed in rumor_file, else the count top-degree nodes '''
    if rumor_file is not None:
        with io.open(rumor_file, encoding='utf-8') as fh:
            labels = parse_label_lines(fh)
        if not labels:
            raise RuntimeError("No rumor seeds in {p}".format(p=rumor_file))
        rumor = sorted(set(g.index_of(labels).tolist()))
    else:
        rumor = sorted(degree_top_k(g, count, direction))
    if len(rumor) >= g.n:
        raise ValueError("Rumor seeds cover every node; nothing left to protect")
    return rumor

def read_seed_file(g, path):
    ''' Internal ids of the node labels listed in a seeds file '''
    with io.open(path, encoding='utf-8') as fh:
        labels = parse_label_lines(fh)
    return sorted(set(g.index_of(labels).tolist())) if labels else []

def write_csv(df, path):
    df.to_csv(path, index=False, float_format='%.6g', lineterminator='\n', encoding='utf-8')

def parse_big_n(text):
    ''' 'n' (N equals the node count) or a number at least 1 '''
    if text.strip().lower() == 'n':
        return None
    value = float(text)
    if not value >= 1.0:
        raise ValueError("N must be 'n' or at least 1, got {t!r}".format(t=text))
    return value

def scaled(count, scale):
    return max(1, int(round(count * scale)))

def select_seeds(algo, g, rumor, k, seed, threads, params=None, sims=DEFAULT_SIMULATIONS,
                 cache=None):
    ''' Run one algorithm; returns (seeds, tuples used, RbrReport or None, seconds) '''
    durations = {}
    with timed(durations, 'total'):
        if algo == 'rbr':
            report = run_rbr(g, rumor, params, seed, threads, cache)
            seeds, tuples_used = list(report.seeds), report.tuples_total
        else:
            kind = BaselineKind(algo, sims) if algo == 'greedy' else BaselineKind(algo)
            report = None
            seeds, tuples_used = run_baseline(kind, g, rumor, k, seed, threads), 0
    return seeds, tuples_used, report, durations['total']

def cmd_generate(args):
    ''' Write a directed power-law graph as an edge list '''
    model = WeightingModel.parse(args.model)
    g = generate_power_law(args.nodes, args.avg_deg, args.exponent, args.seed, model)
    write_edge_list(g, args.output)
    logger.info("Wrote %d nodes, %d edges to %s", g.n, g.m, args.output)
    return EXIT_OK

def cmd_run(args):
    ''' Select positive seeds with one algorithm and report them '''
    algo = args.algo.lower()
    if algo not in ALGORITHMS:
        raise ValueError("Unknown algorithm {a!r}; choose from {c}".format(
            a=args.algo, c=', '.join(ALGORITHMS)))
    model = WeightingModel.parse(args.model)
    g = load_dataset(args.graph, model)
    rumor = resolve_rumors(g, args.rumors, args.rumor_file, args.degree)

    params = None
    if algo == 'rbr':
        params = RbrParams(
            k=args.k, delta1=args.delta1, delta2=args.delta2, delta3=args.delta3,
            big_n=parse_big_n(args.bigN), max_tuples=args.max_tuples, pad=args.pad,
            l_star=args.l_star,
        )
    elif args.k < 0:
        raise ValueError("k must be non-negative, got {k}".format(k=args.k))

    seeds, tuples_used, report, secs = select_seeds(
        algo, g, rumor, args.k, args.seed, args.threads, params, args.sims,
        cache=args.samples_cache,
    )
    labels = g.label_of(seeds)
    out = sys.stdout
    out.write('algo={a}\n'.format(a=algo))
    if report is not None:
        out.write(format_report(
            report, labels=dict(zip(seeds, labels)), timings=not args.no_timings
        ))
    else:
        out.write('seeds={s}\n'.format(s=' '.join(str(x) for x in labels)))

    f_est = f_err = float('nan')
    eval_count = scaled(args.eval_tuples, args.eval_scale) if args.eval_tuples else 0
    if eval_count:
        f_est, f_err = evaluate_tuples(g, rumor, seeds, eval_count, args.seed, args.threads)
        out.write('f_estimate={f:.6g}\nf_stderr={e:.6g}\n'.format(f=f_est, e=f_err))

    if args.seeds_out:
        with io.open(args.seeds_out, 'w', encoding='utf-8', newline='\n') as fh:
            fh.writelines('{x}\n'.format(x=x) for x in labels)
    if args.csv:
        row = [args.graph, model.label, algo, args.k, f_est, f_err, tuples_used,
               0.0 if args.no_timings else 1000.0 * secs, args.seed]
        frame = pd.DataFrame([row], columns=CSV_COLUMNS)
        if report is not None:
            # seeds and wall_ms are already in the row, as labels and as total time
            extra = report_row(report).drop(columns=['seeds', 'wall_ms'])
            frame = pd.concat([frame, extra], axis=1)
        write_csv(frame, args.csv)

    return EXIT_GUARD if report is not None and report.clamped else EXIT_OK

def cmd_evaluate(args):
    ''' Estimate f(S) for a seeds file, independently of how S was chosen '''
    model = WeightingModel.parse(args.model)
    g = load_dataset(args.graph, model)
    rumor = resolve_rumors(g, args.rumors, args.rumor_file, args.degree)
    seeds = read_seed_file(g, args.seeds)
    check_disjoint(rumor, seeds)

    if args.method == 'mc':
        count = scaled(args.count or DEFAULT_MC_TRIALS, args.eval_scale)
        f_est, f_err = evaluate_monte_carlo(g, rumor, seeds, count, args.seed)
    else:
        count = scaled(args.count or DEFAULT_EVAL_TUPLES, args.eval_scale)
        if args.samples_cache:
            samples = cached_sample_set(
                g, rumor, count, args.seed, NS_EVALUATE, args.threads, args.samples_cache
            )
            f_est, f_err = evaluate_on(samples, seeds)
        else:
            f_est, f_err = evaluate_tuples(g, rumor, seeds, count, args.seed, args.threads)
    sys.stdout.write('method={m}\ncount={c}\nf_estimate={f:.6g}\nf_stderr={e:.6g}\n'.format(
        m=args.method, c=count, f=f_est, e=f_err))
    return EXIT_OK

def _positive(name):
    def check(value):
        if value < 1:
            raise ValueError("{name} must be at least 1, got {v}".format(name=name, v=value))
        return value
    return check

def _non_negative(name):
    def check(text):
        value = int(text)
        if value < 0:
            raise ValueError("{name} must be non-negative, got {v}".format(name=name, v=value))
        return value
    return check

def _unit(name):
    def check(text):
        value = float(text)
        if not 0.0 < value < 1.0:
            raise ValueError("{name} must lie in (0, 1), got {v}".format(name=name, v=value))
        return value
    return check

def _boolean(text):
    lowered = text.strip().lower()
    if lowered in ('true', 'yes', '1', 'on'):
        return True
    if lowered in ('false', 'no', '0', 'off'):
        return False
    raise ValueError("Expected true or false, got {t!r}".format(t=text))

def _choice(*options):
    def check(text):
        value = text.strip().lower()
        if value not in options:
            raise ValueError("Expected one of {o}, got {t!r}".format(o=', '.join(options), t=text))
        return value
    return check

def _algorithms(text):
    names = parse_names(text)
    unknown = [a for a in names if a not in ALGORITHMS]
    if unknown or not names:
        raise ValueError("Unknown algorithm(s): {u}".format(u=', '.join(unknown) or '(none)'))
    return tuple(names)

def _int_list(name):
    def check(text):
        values = parse_int_list(text)
        if min(values) < 1:
            raise ValueError("{name} values must be at least 1".format(name=name))
        return tuple(values)
    return check

@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    ''' A k sweep (mode budget) or l* sweep (mode tuples) over algorithms '''
    dataset: str
    name: str = None
    model: WeightingModel = WeightingModel.constant(0.1)
    rumors: int = 20
    rumor_file: str = None
    degree: str = 'out'
    budgets: tuple = tuple(range(1, 21))
    algorithms: tuple = ('rbr', 'proximity', 'random', 'unblocking')
    mode: str = 'budget'
    tuple_budgets: tuple = ()
    evaluation: str = 'tuples'
    eval_tuples: int = DEFAULT_EVAL_TUPLES
    mc_trials: int = DEFAULT_MC_TRIALS
    sims: int = DEFAULT_SIMULATIONS
    delta1: float = None
    delta2: float = 0.1
    delta3: float = 0.1
    big_n: float = None
    max_tuples: int = DEFAULT_MAX_TUPLES
    seed: int = 0
    output: str = 'experiment.csv'
    timings: bool = True

    @property
    def seeds_output(self):
        stem, _ = os.path.splitext(self.output)
        return stem + '.seeds.csv'

    def rbr_params(self, k, l_star=None):
        return RbrParams(
            k=k, delta1=self.delta1, delta2=self.delta2, delta3=self.delta3,
            big_n=self.big_n, max_tuples=self.max_tuples, l_star=l_star,
        )

# config key -> (field, converter)
CONFIG_KEYS = {
    'dataset': ('dataset', str),
    'name': ('name', str),
    'model': ('model', WeightingModel.parse),
    'rumors': ('rumors', lambda t: _positive('rumors')(parse_count(t))),
    'rumor_file': ('rumor_file', str),
    'degree': ('degree', _choice('out', 'in', 'total')),
    'k': ('budgets', _int_list('k')),
    'algorithms': ('algorithms', _algorithms),
    'mode': ('mode', _choice('budget', 'tuples')),
    'l_star': ('tuple_budgets', _int_list('l_star')),
    'evaluation': ('evaluation', _choice('tuples', 'mc')),
    'eval_tuples': ('eval_tuples', lambda t: _positive('eval_tuples')(parse_count(t))),
    'mc_trials': ('mc_trials', lambda t: _positive('mc_trials')(parse_count(t))),
    'sims': ('sims', lambda t: _positive('sims')(parse_count(t))),
    'delta1': ('delta1', lambda t: None if t.strip().lower() == 'auto' else _unit('delta1')(t)),
    'delta2': ('delta2', _unit('delta2')),
    'delta3': ('delta3', _unit('delta3')),
    'bigN': ('big_n', parse_big_n),
    'max_tuples': ('max_tuples', lambda t: _positive('max_tuples')(parse_count(t))),
    'seed': ('seed', _non_negative('seed')),
    'output': ('output', str),
    'timings': ('timings', _boolean),
}

def parse_experiment_config(lines):
    ''' Build an ExperimentConfig from key = value lines

    Raises
    ------
    RuntimeError naming the line for unknown keys, bad values, a missing
    dataset, or a tuples-mode sweep without l_star values or with algorithms
    other than rbr

    Examples
    --------
    >>> cfg = parse_experiment_config(['dataset = g.txt', 'k = 1,5'])
    >>> cfg.budgets
    (1, 5)
    '''
    raw = parse_config_lines(lines)
    fields = {}
    for key, (value, lineno) in raw.items():
        if key not in CONFIG_KEYS:
            raise RuntimeError("Unknown key {k!r} on line {n}".format(k=key, n=lineno))
        field, convert = CONFIG_KEYS[key]
        try:
            fields[field] = convert(value)
        except ValueError as err:
            raise RuntimeError("Bad value for {k!r} on line {n}: {e}".format(k=key, n=lineno, e=err))

    if 'dataset' not in fields:
        raise RuntimeError("Missing required key 'dataset'")
    if fields.get('mode') == 'tuples':
        if not fields.get('tuple_budgets'):
            raise RuntimeError("mode = tuples needs an l_star list (line {n})".format(
                n=raw['mode'][1]))
        if fields.get('algorithms', ('rbr',)) != ('rbr',):
            raise RuntimeError("mode = tuples runs rbr only (line {n})".format(
                n=raw['algorithms'][1]))
        fields['algorithms'] = ('rbr',)
    if fields.get('name') is None:
        fields['name'] = os.path.basename(fields['dataset'])
    return ExperimentConfig(**fields)

def run_experiment(cfg, threads=1, eval_scale=1.0):
    ''' Run every cell of an experiment

    Cells run one after another. Each cell's selection gets its own seed
    derived from the master seed; all seed sets are then scored on one
    shared stream of evaluation tuples (or Monte Carlo trials).

    Returns
    -------
    (results DataFrame, seeds DataFrame, number of clamped RBR runs)
    '''
    g = load_dataset(cfg.dataset, cfg.model)
    rumor = resolve_rumors(g, cfg.rumors, cfg.rumor_file, cfg.degree)
    logger.info("Dataset %s: n=%d m=%d, %d rumor seeds", cfg.name, g.n, g.m, len(rumor))

    l_values = cfg.tuple_budgets if cfg.mode == 'tuples' else (None,)
    cells = []
    clamped = 0
    for k in cfg.budgets:
        for li, l_star in enumerate(l_values):
            for ai, algo in enumerate(cfg.algorithms):
                cell_seed = derive_seed(cfg.seed, NS_CELL, ai, k, li)
                params = cfg.rbr_params(k, l_star) if algo == 'rbr' else None
                seeds, tuples_used, report, secs = select_seeds(
                    algo, g, rumor, k, cell_seed, threads, params, cfg.sims
                )
                clamped += int(report is not None and report.clamped)
                logger.info("Cell k=%d algo=%s tuples=%d: %d seeds in %.3fs",
                            k, algo, tuples_used, len(seeds), secs)
                cells.append((algo, k, seeds, tuples_used, secs))

    seed_sets = [seeds for _, _, seeds, _, _ in cells]
    if cfg.evaluation == 'mc':
        trials = scaled(cfg.mc_trials, eval_scale)
        scores = [evaluate_monte_carlo(g, rumor, s, trials, cfg.seed) for s in seed_sets]
    else:
        count = scaled(cfg.eval_tuples, eval_scale)
        logger.info("Evaluating %d seed sets on %d tuples", len(seed_sets), count)
        scores = evaluate_many(g, rumor, seed_sets, count, cfg.seed, threads)

    rows, seed_rows = [], []
    for (algo, k, seeds, tuples_used, secs), (f_est, f_err) in zip(cells, scores):
        wall_ms = 1000.0 * secs if cfg.timings else 0.0
        rows.append([cfg.name, cfg.model.label, algo, k, f_est, f_err,
                     tuples_used, wall_ms, cfg.seed])
        seed_rows.append([cfg.name, cfg.model.label, algo, k, tuples_used,
                          ' '.join(str(x) for x in g.label_of(seeds))])
    return (pd.DataFrame(rows, columns=CSV_COLUMNS),
            pd.DataFrame(seed_rows, columns=SEEDS_COLUMNS),
            clamped)

def cmd_experiment(args):
    ''' Run a configured sweep and write its results and seeds CSVs '''
    with io.open(args.config, encoding='utf-8') as fh:
        cfg = parse_experiment_config(fh)
    if args.output:
        cfg = dataclasses.replace(cfg, output=args.output)
    if args.no_timings:
        cfg = dataclasses.replace(cfg, timings=False)
    results, seeds, clamped = run_experiment(cfg, args.threads, args.eval_scale)
    write_csv(results, cfg.output)
    write_csv(seeds, cfg.seeds_output)
    logger.info("Wrote %d rows to %s", len(results), cfg.output)
    if clamped:
        logger.warning("%d RBR runs hit max_tuples", clamped)
        return EXIT_GUARD
    return EXIT_OK

def _add_common(parser):
    parser.add_argument('--seed', type=int, default=0, help='master seed')
    parser.add_argument('--threads', type=int, default=1, help='worker cap')
    parser.add_argument('-v', '--verbose', action='store_true', help='debug logging')
    parser.add_argument('-q', '--quiet', action='store_true', help='warnings only')

def _add_graph(parser):
    parser.add_argument('graph', help="edge-list file or powerlaw:<n>:<avg_deg>[:<exp>[:<seed>]]")
    parser.add_argument('--model', default='cp', help='cp, cp:<p>, wc or file')
    parser.add_argument('--rumors', type=parse_count, default=20,
                        help='number of top-degree rumor seeds')
    parser.add_argument('--rumor-file', help='node labels of the rumor seeds')
    parser.add_argument('--degree', choices=('out', 'in', 'total'), default='out',
                        help='degree used to rank rumor seeds')
    parser.add_argument('--eval-scale', type=float, default=1.0,
                        help='multiplier on evaluation counts')

def build_parser():
    parser = ArgumentParser(prog='rumor-block', description=__doc__.strip())
    sub = parser.add_subparsers(dest='command', metavar='command')
    sub.required = True

    gen = sub.add_parser('generate', help='write a power-law graph')
    _add_common(gen)
    gen.add_argument('--nodes', type=parse_count, required=True)
    gen.add_argument('--avg-deg', type=float, default=10.4)
    gen.add_argument('--exponent', type=float, default=2.5)
    gen.add_argument('--model', default='cp', help='cp, cp:<p> or wc')
    gen.add_argument('-o', '--output', required=True)
    gen.set_defaults(func=cmd_generate)

    run = sub.add_parser('run', help='select positive seeds')
    _add_common(run)
    _add_graph(run)
    run.add_argument('--algo', default='rbr', help=', '.join(ALGORITHMS))
    run.add_argument('--k', type=int, default=20)
    run.add_argument('--delta1', type=float, default=None, help='default: minimise l*')
    run.add_argument('--delta2', type=float, default=0.1)
    run.add_argument('--delta3', type=float, default=0.1)
    run.add_argument('--bigN', default='n', help="N, or 'n' for the node count")
    run.add_argument('--max-tuples', type=parse_count, default=DEFAULT_MAX_TUPLES)
    run.add_argument('--l-star', type=parse_count, default=None,
                     help='fixed tuple count; skips OPT_k estimation')
    run.add_argument('--pad', action='store_true', help='always return k seeds')
    run.add_argument('--sims', type=parse_count, default=DEFAULT_SIMULATIONS,
                     help='simulations per greedy estimate')
    run.add_argument('--eval-tuples', type=parse_count, default=DEFAULT_EVAL_TUPLES,
                     help='evaluation tuples, 0 to skip')
    run.add_argument('--seeds-out', help='write selected seed labels here')
    run.add_argument('--csv', help='write a one-row results CSV here')
    run.add_argument('--no-timings', action='store_true', help='write wall_ms as 0')
    run.add_argument('--samples-cache', help='SampleSet file reused for the rbr selection tuples')
    run.set_defaults(func=cmd_run)

    ev = sub.add_parser('evaluate', help='estimate f for a seeds file')
    _add_common(ev)
    _add_graph(ev)
    ev.add_argument('--seeds', required=True, help='node labels of the positive seeds')
    ev.add_argument('--method', choices=('tuples', 'mc'), default='tuples')
    ev.add_argument('--count', type=parse_count, default=None,
                    help='tuples (default 1M) or trials (default 2000)')
    ev.add_argument('--samples-cache', help='SampleSet file reused for the evaluation tuples')
    ev.set_defaults(func=cmd_evaluate)

    exp = sub.add_parser('experiment', help='run a configured sweep')
    _add_common(exp)
    exp.add_argument('config', help='key = value experiment file')
    exp.add_argument('-o', '--output', help='overrides the output key')
    exp.add_argument('--eval-scale', type=float, default=1.0)
    exp.add_argument('--no-timings', action='store_true', help='write wall_ms as 0')
    exp.set_defaults(func=cmd_experiment)
    return parser

def main(argv=None):
    ''' Entry point; returns the exit code '''
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    if args.threads < 1:
        logger.error("--threads must be at least 1")
        return EXIT_USAGE
    try:
        return args.func(args)
    except GuardError as err:
        logger.error("%s", err)
        return EXIT_GUARD
    except ValueError as err:
        logger.error("%s", err)
        return EXIT_USAGE
    except (RuntimeError, OSError) as err:
        logger.error("%s", err)
        return EXIT_DATA
