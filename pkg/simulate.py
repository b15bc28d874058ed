import os
import sys
from harness import (results_frame, run_alpha_sweep, run_asymptotic, run_moments, run_regions,
                     run_scatter, run_ser, scatter_frame)
from mimo_utils.common_utils import dump_options, report, write_csv
from mimo_utils.errors import SimulationError
from options import build_config, get_parser_sim


def _stem(out):
    return os.path.splitext(out)[0]


def _log_to_wandb(opts, config, results):
    import wandb

    run = wandb.init(project=opts.wandb_project_name, config=vars(opts))
    for step, result in enumerate(results):
        wandb.log({f'SER/{key}': value for key, value in result.as_row().items()}, step=step)
    run.finish()


def run_command(opts, config, logfile):
    out = opts.out
    if opts.command == 'moments':
        table = run_moments(config, logfile)
        table.write_csv(out)
        if opts.asymptotic:
            write_csv(run_asymptotic(config, logfile).to_frame(), _stem(out) + '_asymptotic.csv')
    elif opts.command == 'scatter':
        rows = run_scatter(config, logfile)
        write_csv(scatter_frame(rows), out)
        centers = run_moments(config, logfile).to_frame()
        centers.insert(0, 'symbol_index', range(len(centers)))
        write_csv(centers, _stem(out) + '_expected.csv')
    elif opts.command == 'regions':
        write_csv(run_regions(config, logfile), out)
    else:
        sweep = run_alpha_sweep if opts.command == 'ser-vs-alpha' else run_ser
        results = sweep(config, logfile)
        write_csv(results_frame(results), out)
        if opts.wandb:
            _log_to_wandb(opts, config, results)
    report(f"wrote {out}", logfile)


def main(argv=None):
    opts = get_parser_sim().parse_args(argv)
    if opts.out is None:
        opts.out = f"{opts.command}.csv"
    try:
        config = build_config(opts)
    except SimulationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    out_dir = os.path.dirname(opts.out)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    stem = _stem(opts.out)
    # Dump options
    dump_options({**vars(opts), **vars(config)}, stem + '_opts.txt')
    with open(stem + '_log.txt', 'w') as logfile:
        report(f"Running {opts.command} (sweep '{config.sweep}', seed {config.seed})...", logfile)
        try:
            run_command(opts, config, logfile)
        except SimulationError as e:
            logfile.write(f"error: {e}\n")
            print(f"error: {e}", file=sys.stderr)
            return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
