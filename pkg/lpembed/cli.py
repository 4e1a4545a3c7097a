"""
Interface de linha de comando: embed, certify e scaling
"""

from pathlib import Path
from typing import List, Optional
import argparse
import logging
import time

import numpy as np
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .config import configure_logging, settings
from .exceptions import (
    EXIT_CODES,
    CertificateFailure,
    CertificateMismatchError,
    InvalidInputError,
    LpEmbedError,
)
from .models.embedding import RunReport
from .services.embedder import certify, embed, empirical_distortion, size_bound
from .services.experiments import growth_slope, run_scaling
from .services.lift import build_lift, check_even_p, dimension_bounds
from .services.subspace_io import (
    GENERATOR_NAME,
    SUBSPACE_KINDS,
    gen_subspace,
    load_embedding,
    read_subspace_csv,
    save_embedding,
    write_json,
)

logger = logging.getLogger(__name__)

# Console para output formatado
console = Console()
err_console = Console(stderr=True)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser que sinaliza erros com o código de validação"""

    def error(self, message):
        raise InvalidInputError(message)


def _u64(value: str) -> int:
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"semente inválida: {value!r}")
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"semente fora de [0, 2^64): {seed}")
    return seed


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=settings.PROJECT_NAME, description='Embeddings (1+ε) de subespaços de ℓ_p em ℓ_p^n (p par).')
    parser.add_argument('--log-level', default=None, help='Nível de log (padrão: config.yaml)')
    parser.add_argument('--n-jobs', type=int, default=None, help='Threads para a varredura de candidatos')
    sub = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    p_embed = sub.add_parser('embed', help='Constrói e certifica um embedding')
    source = p_embed.add_mutually_exclusive_group(required=True)
    source.add_argument('--input', help='CSV da base (m linhas, k colunas)')
    source.add_argument('--kind', choices=SUBSPACE_KINDS, help='Gera o subespaço')
    p_embed.add_argument('--k', type=int, help='Dimensão do subespaço gerado')
    p_embed.add_argument('--m', type=int, help='Número de coordenadas do subespaço gerado')
    p_embed.add_argument('--seed', type=_u64, default=0, help='Semente de 64 bits do gerador')
    p_embed.add_argument('--p', type=int, required=True, help='Expoente par p >= 2')
    p_embed.add_argument('--eps', type=float, required=True, help='Precisão alvo em (0, 1)')
    p_embed.add_argument('--trials', type=int, default=settings.DEFAULT_TRIALS,
                         help='Amostras para a distorção empírica')
    p_embed.add_argument('--out', help='JSON de saída do embedding')
    p_embed.add_argument('--report', help='JSON de saída do relatório')
    p_embed.set_defaults(handler=cmd_embed)

    p_cert = sub.add_parser('certify', help='Recalcula o certificado de um embedding salvo')
    p_cert.add_argument('--embedding', required=True, help='JSON do embedding')
    p_cert.add_argument('--input', required=True, help='CSV da base')
    p_cert.set_defaults(handler=cmd_certify)

    p_scale = sub.add_parser('scaling', help='Varredura de n em função de k')
    p_scale.add_argument('--p', type=int, required=True)
    p_scale.add_argument('--eps', type=float, required=True)
    p_scale.add_argument('--kmin', type=int, required=True)
    p_scale.add_argument('--kmax', type=int, required=True)
    p_scale.add_argument('--m', type=int, required=True)
    p_scale.add_argument('--seed', type=_u64, default=0, help='Semente de 64 bits do gerador')
    p_scale.add_argument('--seeds', type=int, default=1, help='Sementes por valor de k')
    p_scale.add_argument('--out', required=True, help='CSV de saída')
    p_scale.set_defaults(handler=cmd_scaling)

    return parser


def _summary_table(title: str, rows: dict) -> Table:
    table = Table(title=title)
    table.add_column("Campo", style="cyan")
    table.add_column("Valor", justify="right")
    for key, value in rows.items():
        table.add_row(key, f"{value:.9g}" if isinstance(value, float) else str(value))
    return table


def cmd_embed(args) -> int:
    """Lê ou gera o subespaço, executa embed + certify + distorção empírica"""
    start = time.perf_counter()
    p = check_even_p(args.p)

    if args.input:
        sub = read_subspace_csv(args.input)
        kind = 'file'
    else:
        if args.k is None or args.m is None:
            raise InvalidInputError("--kind exige --k e --m")
        sub = gen_subspace(args.kind, args.k, args.m, args.seed)
        kind = args.kind

    emb = embed(sub, p, args.eps, n_jobs=args.n_jobs)
    report = empirical_distortion(emb, sub, args.trials, args.seed)
    _, asymptotic, naive = dimension_bounds(sub.k, p)

    run = RunReport(
        kind=kind,
        k=sub.k,
        m=sub.m,
        p=p,
        eps=emb.eps,
        seed=args.seed,
        input_path=args.input,
        generator=GENERATOR_NAME,
        n=emb.n,
        D=emb.D,
        r=emb.r,
        theta=emb.theta,
        eps_inner=emb.eps_inner,
        cert_lower=emb.cert_lower,
        cert_upper=emb.cert_upper,
        empirical_min_ratio=report.min_ratio,
        empirical_max_ratio=report.max_ratio,
        trials=report.trials,
        size_bound=size_bound(sub.k, p, emb.eps),
        asymptotic_bound=asymptotic / emb.eps**2,
        naive_bound=naive,
        passed=emb.passes,
        wall_time_s=time.perf_counter() - start,
    )

    if args.out:
        save_embedding(emb, args.out)
    if args.report:
        write_json(run.model_dump(), args.report)

    console.print(_summary_table("Embedding", {
        'k': run.k, 'm': run.m, 'p': run.p, 'eps': run.eps,
        'n': run.n, 'D': run.D, 'r': run.r,
        'cert_lower': run.cert_lower, 'cert_upper': run.cert_upper,
        'razão mínima': run.empirical_min_ratio, 'razão máxima': run.empirical_max_ratio,
        'status': 'PASSOU' if run.passed else 'FALHOU',
    }))

    if not emb.passes:
        raise CertificateFailure(f"cert_upper={emb.cert_upper:.9f} > 1+eps={1 + emb.eps}")
    return EXIT_CODES['OK']


def cmd_certify(args) -> int:
    """Recalcula o certificado e compara com o arquivo"""
    emb = load_embedding(args.embedding)
    sub = read_subspace_csv(args.input)
    lifted = build_lift(sub, emb.p)
    lambda_min, lambda_max, cert_lower, cert_upper = certify(emb, lifted)

    console.print(_summary_table("Certificado", {
        'lambda_min': lambda_min, 'lambda_max': lambda_max,
        'cert_lower': cert_lower, 'cert_upper': cert_upper,
        'cert_lower (arquivo)': emb.cert_lower, 'cert_upper (arquivo)': emb.cert_upper,
    }))

    tol = settings.NUMERIC.cert_match_tol
    if abs(cert_lower - emb.cert_lower) > tol or abs(cert_upper - emb.cert_upper) > tol:
        raise CertificateMismatchError(
            f"certificado recalculado [{cert_lower:.12f}, {cert_upper:.12f}] difere do arquivo "
            f"[{emb.cert_lower:.12f}, {emb.cert_upper:.12f}]"
        )
    return EXIT_CODES['OK']


def cmd_scaling(args) -> int:
    """Varredura de k; grava CSV (k, seed, D, r, n, cert_upper) e resumo com a inclinação"""
    p = check_even_p(args.p)
    df = run_scaling(p, args.eps, args.kmin, args.kmax, args.m, args.seed,
                     seeds=args.seeds, n_jobs=args.n_jobs)
    slope = growth_slope(df)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(out, index=False, encoding='utf-8')
    write_json({
        'p': p,
        'eps': args.eps,
        'kmin': args.kmin,
        'kmax': args.kmax,
        'm': args.m,
        'seed': args.seed,
        'seeds': args.seeds,
        'slope': slope,
        'expected_slope': p / 2,
        'csv': str(out),
    }, out.with_suffix('.summary.json'))

    table = Table(title=f"Escala p={p}, eps={args.eps}")
    for col in df.columns:
        table.add_column(col, justify="right")
    for row in df.itertuples(index=False):
        table.add_row(*[f"{v:.6f}" if isinstance(v, float) else str(v) for v in row])
    console.print(table)
    console.print(f"Inclinação log n / log k: {slope if slope is None else f'{slope:.4f}'} (teoria: {p / 2})")
    return EXIT_CODES['OK']


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        configure_logging(args.log_level)
        return args.handler(args)
    except LpEmbedError as e:
        logger.error(f"{type(e).__name__}: {e}")
        err_console.print(f"[bold red]Erro:[/bold red] {escape(str(e))}", soft_wrap=True)
        return e.exit_code
    except ValidationError as e:
        err_console.print(f"[bold red]Erro de validação:[/bold red] {escape(str(e))}", soft_wrap=True)
        return EXIT_CODES['VALIDATION']
    except np.linalg.LinAlgError as e:
        logger.error(f"LinAlgError: {e}")
        err_console.print(f"[bold red]Erro numérico:[/bold red] {escape(str(e))}", soft_wrap=True)
        return EXIT_CODES['NUMERICAL']


if __name__ == '__main__':
    raise SystemExit(main())
