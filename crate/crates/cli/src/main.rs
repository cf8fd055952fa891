mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use lcsa_core::annih::{build_annihilation, match_closed_form};
use lcsa_core::autgrp::{aut_case, aut_instances, group_axiom_sample, necessity_probes};
use lcsa_core::catalog::{verification_specs, Family};
use lcsa_core::classify::{
    derive_odd_structure, odd_system, shift_params, solve_fgh, solve_shift, solve_shift_parametric_with, EvenType, FghKnown,
    SolutionSpace, Template,
};
use lcsa_core::lcsa::{derived_series, is_nilpotent, is_solvable, lower_central_series, ConformalSuperAlgebra, Series};
use lcsa_core::polyring::{MultiPoly, Rational, Var};
use lcsa_core::repmod::{fnicm_table, irreducibility_probe, verification_module_specs, ModuleFamily, ModuleFamilySpec, Verdict};

use input::{fail, family_spec, lookup, parse_params, poly_param, rational_param, read_algebra_file, Input, InputError};
use report::{Report, Sink, Status};

#[derive(Parser)]
#[command(name = "lcsa", version, about = "Checks and classifies rank (2|1) Lie conformal superalgebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Truncation degree for solvers, probes and ansätze.
    #[arg(long, global = true)]
    degree: Option<u32>,
    /// Mode cap for annihilation algebras.
    #[arg(long, global = true, default_value_t = 8)]
    level: u32,
    /// Number of random group elements per automorphism case.
    #[arg(long, global = true, default_value_t = 50)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Family tag, e.g. D2, HVS, Dbar, O1(3), or a module tag for `modules`.
    #[arg(long, global = true)]
    family: Option<String>,
    /// Slot values as k=v pairs separated by commas.
    #[arg(long, global = true)]
    params: Option<String>,
    /// Aligned text lines instead of JSON records.
    #[arg(long, global = true)]
    text: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Skew-symmetry and Jacobi for every catalog family, module axioms for every module family.
    VerifyCatalog {
        /// Corrupt one bracket of the first family before checking.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Axioms for an algebra read from a JSON file.
    Check { file: String },
    /// Derived and lower central series.
    Series {
        #[arg(long)]
        file: Option<String>,
    },
    /// Annihilation algebra checks.
    Ann,
    /// Automorphism group sampling and necessity probes.
    Aut,
    /// Polynomial functional equations: shift, fgh, a_system, odd, derive.
    Solve { template: String },
    /// Module axioms and irreducibility probes.
    Modules {
        /// Apply the parity change functor.
        #[arg(long)]
        parity_change: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let mut sink = Sink::new(!cli.global.text);
    let result = run(&cli, &mut sink);
    let mut out = std::io::stdout().lock();
    if sink.emit(&mut out).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(2);
    }
    if let Err(e) = result {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let (pass, failed, skipped) = (sink.count(Status::Pass), sink.count(Status::Fail), sink.count(Status::Skipped));
    eprintln!("{pass} passed, {failed} failed, {skipped} skipped in {:.2?}", start.elapsed());
    if failed > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: &Cli, sink: &mut Sink) -> Input<()> {
    let g = &cli.global;
    let params = parse_params(g.params.as_deref())?;
    match &cli.command {
        Command::VerifyCatalog { inject_fault } => verify_catalog(g, *inject_fault, sink),
        Command::Check { file } => {
            let alg = instantiate_file(read_algebra_file(file)?, &params)?;
            axioms(&alg, file, sink);
            Ok(())
        }
        Command::Series { file } => {
            let (alg, target) = match file {
                Some(f) => (instantiate_file(read_algebra_file(f)?, &params)?, f.clone()),
                None => {
                    let Some(fam) = &g.family else { return fail("series needs --family or --file") };
                    let spec = family_spec(fam, &params)?;
                    (spec.build()?, spec.label())
                }
            };
            series(&alg, &target, sink)
        }
        Command::Ann => ann(g, &params, sink),
        Command::Aut => aut(g, &params, sink),
        Command::Solve { template } => solve(g, template, &params, sink),
        Command::Modules { parity_change } => modules(g, &params, *parity_change, sink),
    }
}

fn instantiate_file(alg: ConformalSuperAlgebra, params: &[(String, String)]) -> Input<ConformalSuperAlgebra> {
    let mut map = Vec::new();
    for (k, _) in params {
        let Some(v) = rational_param(params, k)? else { continue };
        map.push((Var::param(k), v));
    }
    Ok(alg.instantiate(&map))
}

fn axioms(alg: &ConformalSuperAlgebra, target: &str, sink: &mut Sink) {
    let skew = alg.check_skew();
    let mut r = Report::pass_if("skew", target, skew.is_empty());
    if let Some(v) = skew.first() {
        r = r
            .witness(format!("({}, {}, {}): {}", alg.name(v.i), alg.name(v.j), alg.name(v.k), v.residual))
            .detail(format!("{} violations", skew.len()));
    }
    sink.push(r);
    let jac = alg.check_jacobi();
    let mut r = Report::pass_if("jacobi", target, jac.is_empty());
    if let Some(v) = jac.first() {
        r = r
            .witness(format!(
                "({}, {}, {}; {}): {}",
                alg.name(v.i),
                alg.name(v.j),
                alg.name(v.k),
                alg.name(v.t),
                v.residual
            ))
            .detail(format!("{} violations", jac.len()));
    }
    sink.push(r);
}

fn verify_catalog(g: &Global, inject_fault: bool, sink: &mut Sink) -> Input<()> {
    let filter = match &g.family {
        Some(f) => Some(Family::parse(f)?),
        None => None,
    };
    let mut first = true;
    for spec in verification_specs() {
        if filter.is_some_and(|f| f != spec.family) {
            continue;
        }
        let mut alg = spec.build()?;
        if inject_fault && first {
            let (i, k) = (0, 0);
            let q = alg.entry(i, i, k) + MultiPoly::l();
            alg.set_entry_raw(i, i, k, q);
        }
        first = false;
        axioms(&alg, &spec.label(), sink);
    }
    if filter.is_some() {
        return Ok(());
    }
    for spec in verification_module_specs() {
        let label = spec.label();
        let module = spec.build()?;
        let v = module.check_module();
        let mut r = Report::pass_if("module", &label, v.is_empty());
        if let Some(v) = v.first() {
            r = r.witness(format!("(i={}, j={}, u={}, z={}): {}", v.i, v.j, v.u, v.z, v.residual));
        }
        sink.push(r);
    }
    Ok(())
}

fn describe(s: &Series) -> String {
    let ranks: Vec<String> = s.terms.iter().map(|t| t.rank().to_string()).collect();
    let mut out = format!("ranks [{}]", ranks.join(", "));
    if s.capped {
        out.push_str(" (capped)");
    }
    out
}

fn series(alg: &ConformalSuperAlgebra, target: &str, sink: &mut Sink) -> Input<()> {
    let derived = derived_series(alg)?;
    sink.push(Report::new("derived_series", target, Status::Pass).detail(describe(&derived)));
    let lower = lower_central_series(alg)?;
    sink.push(Report::new("lower_central_series", target, Status::Pass).detail(describe(&lower)));
    let solvable = is_solvable(alg)?;
    let nilpotent = is_nilpotent(alg)?;
    sink.push(Report::new("solvable", target, Status::Pass).detail(solvable.to_string()));
    sink.push(Report::new("nilpotent", target, Status::Pass).detail(nilpotent.to_string()));
    let even = is_solvable(&alg.even_part())?;
    sink.push(
        Report::pass_if("solvable_iff_even_solvable", target, even == solvable)
            .detail(format!("algebra {solvable}, even part {even}")),
    );
    Ok(())
}

fn ann(g: &Global, params: &[(String, String)], sink: &mut Sink) -> Input<()> {
    let spec = family_spec(g.family.as_deref().unwrap_or("HVS"), params)?;
    let target = spec.label();
    let valid = spec.validate();
    let alg = match &valid {
        Ok(()) => spec.build()?,
        Err(_) => spec.build_forced()?,
    };
    match match_closed_form(&alg, g.level) {
        Ok(rep) => {
            let mut r = Report::pass_if("closed_form", &target, rep.passed()).detail(format!("{} entries", rep.entries.len()));
            if let Some(m) = rep.mismatches().next() {
                r = r.witness(m.label.clone());
            }
            sink.push(r);
        }
        Err(e) => sink.push(Report::new("closed_form", &target, Status::Skipped).detail(e.to_string())),
    }
    if let Err(e) = valid {
        sink.push(Report::new("ann_axioms", &target, Status::Skipped).detail(format!("symbolic slots: {e}")));
        return Ok(());
    }
    let lie = build_annihilation(&alg, g.level, false);
    let anti = lie.check_antisymmetry();
    let mut r = Report::pass_if("antisymmetry", &target, anti.is_empty());
    if let Some((x, y)) = anti.first() {
        r = r.witness(format!("[{}, {}]", lie.name(*x), lie.name(*y)));
    }
    sink.push(r);
    let jac = lie.check_super_jacobi_filtered();
    let mut r = Report::pass_if("super_jacobi", &target, jac.passed())
        .detail(format!("{} checked, {} beyond the cap", jac.checked, jac.skipped));
    if let Some(f) = jac.failures.first() {
        r = r.witness(format!("({}, {}, {})", lie.name(f.x), lie.name(f.y), lie.name(f.z)));
    }
    sink.push(r);
    Ok(())
}

fn aut(g: &Global, params: &[(String, String)], sink: &mut Sink) -> Input<()> {
    let specs = match &g.family {
        Some(f) => vec![family_spec(f, params)?],
        None => aut_instances(),
    };
    for spec in specs {
        let target = spec.label();
        let case = aut_case(&spec)?;
        let rep = group_axiom_sample(&spec, g.samples, g.seed)?;
        let mut r = Report::pass_if("aut_sample", &target, rep.passed()).detail(format!(
            "{}: {}; {} members, {} non-members",
            case.label, case.group, rep.members, rep.nonmembers
        ));
        if let Some(w) = rep.member_failures.iter().chain(&rep.closure_failures).chain(&rep.soundness_failures).next() {
            r = r.witness(w.clone());
        }
        sink.push(r);
        for (which, holds) in necessity_probes(&spec, g.seed)? {
            sink.push(Report::pass_if(&format!("aut_necessity_{which:?}").to_lowercase(), &target, !holds));
        }
    }
    Ok(())
}

fn show_space(space: &SolutionSpace) -> String {
    let basis: Vec<String> = space
        .basis_polys()
        .iter()
        .map(|ps| {
            let parts: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
            format!("({})", parts.join(", "))
        })
        .collect();
    let names: Vec<&str> = space.unknowns.iter().map(|u| u.name.as_str()).collect();
    format!("dim {} over ({}): [{}]", space.dim(), names.join(", "), basis.join(", "))
}

fn even_type(params: &[(String, String)]) -> Input<EvenType> {
    let Some(tag) = lookup(params, "even") else { return fail("--params needs even=A|B|C|D") };
    let poly = |k: &str| -> Input<MultiPoly> { Ok(poly_param(params, k)?.unwrap_or_else(MultiPoly::zero)) };
    let rational = |k: &str| -> Input<Rational> {
        rational_param(params, k)?.ok_or_else(|| InputError(format!("--params needs a rational `{k}` for type D")))
    };
    match tag.to_ascii_uppercase().as_str() {
        "A" => Ok(EvenType::A { q1: poly("q1")?, p1: poly("p1")? }),
        "B" => Ok(EvenType::B),
        "C" => Ok(EvenType::C),
        "D" => Ok(EvenType::D { a: rational("a")?, b: rational("b")?, q: poly("q")? }),
        other => fail(format!("--params even: unknown type `{other}`")),
    }
}

fn solve(g: &Global, template: &str, params: &[(String, String)], sink: &mut Sink) -> Input<()> {
    let degree = g.degree.unwrap_or(4);
    if template.eq_ignore_ascii_case("derive") {
        let even = even_type(params)?;
        for fam in derive_odd_structure(&even, degree)? {
            let target = format!("{} / {}", fam.even, fam.action);
            let matched = match &fam.matched {
                Some(s) => format!("matches {}", s.label()),
                None => "no catalog match".to_string(),
            };
            sink.push(Report::pass_if("derived_family", &target, fam.sound).detail(format!(
                "psi1 = {}, psi2 = {}, {matched}",
                fam.psi1, fam.psi2
            )));
        }
        return Ok(());
    }
    let template = Template::parse(template)?;
    match template {
        Template::Shift => {
            let names = ["a", "b", "alpha", "beta"];
            let mut fixed = Vec::new();
            for (n, v) in names.iter().zip(shift_params()) {
                if let Some(c) = rational_param(params, n)? {
                    fixed.push((v, c));
                }
            }
            if fixed.len() == 4 {
                let c: Vec<&Rational> = fixed.iter().map(|(_, c)| c).collect();
                let space = solve_shift(c[0], c[1], c[2], c[3], degree)?;
                sink.push(Report::new("shift", "f", Status::Pass).detail(show_space(&space)));
            } else {
                for br in solve_shift_parametric_with(&fixed, degree) {
                    let conds: Vec<String> = br.solved.iter().map(|(v, e)| format!("{v} = {e}")).collect();
                    let mut detail = format!("degree {}: {}", br.degree, conds.join(", "));
                    for r in &br.residual {
                        detail.push_str(&format!(", {r} = 0"));
                    }
                    match br.f() {
                        Some(f) => detail.push_str(&format!("; f = {f}")),
                        None => detail.push_str(&format!("; f = ({}) / ({})", br.f_num, br.f_den)),
                    }
                    sink.push(Report::new("shift_branch", "f", Status::Pass).detail(detail));
                }
            }
        }
        Template::FgH => {
            let known = match (poly_param(params, "f")?, poly_param(params, "g")?, poly_param(params, "h")?) {
                (Some(f), None, None) => FghKnown::F(f),
                (None, Some(gp), Some(h)) => FghKnown::GH(gp, h),
                _ => return fail("fgh needs f=... or both g=... and h=..."),
            };
            let space = solve_fgh(&known, degree)?;
            sink.push(Report::new("fgh", "f, g, h", Status::Pass).detail(show_space(&space)));
        }
        Template::ASystem | Template::OddSystem => {
            let even = even_type(params)?;
            if template == Template::ASystem && even.tag() != "A" {
                return fail("a_system needs even=A");
            }
            let act_a = poly_param(params, "act_a")?.unwrap_or_else(MultiPoly::zero);
            let act_b = poly_param(params, "act_b")?.unwrap_or_else(MultiPoly::zero);
            let eq = odd_system(&even, &act_a, &act_b, degree)?;
            let space = eq.solve()?;
            sink.push(Report::pass_if("odd_system", even.tag(), eq.verify(&space)).detail(show_space(&space)));
        }
    }
    Ok(())
}

fn module_specs(g: &Global, params: &[(String, String)]) -> Input<Vec<ModuleFamilySpec>> {
    let Some(tag) = &g.family else { return Ok(verification_module_specs()) };
    if let Ok(mf) = ModuleFamily::parse(tag) {
        let slots = mf.slots();
        let (own, rest): (Vec<_>, Vec<_>) = params.iter().cloned().partition(|(k, _)| slots.contains(&k.as_str()));
        let algebra = match lookup(&rest, "algebra") {
            Some(a) => a.to_string(),
            None => mf.default_algebra().tag(),
        };
        let rest: Vec<_> = rest.into_iter().filter(|(k, _)| k != "algebra").collect();
        let mut spec = ModuleFamilySpec::over(mf, family_spec(&algebra, &rest)?);
        for (k, v) in &own {
            spec = spec.set_text(k, v).map_err(|e| InputError(format!("--params {k}: {e}")))?;
        }
        return Ok(vec![spec]);
    }
    let fam = Family::parse(tag)?;
    let algebra = family_spec(&fam.tag(), params)?;
    let mods: Vec<ModuleFamily> = fnicm_table().into_iter().filter(|(f, _)| *f == fam).flat_map(|(_, m)| m).collect();
    if mods.is_empty() {
        return fail(format!("no module families recorded over {fam}"));
    }
    Ok(mods.into_iter().map(|m| ModuleFamilySpec::over(m, algebra.clone())).collect())
}

fn modules(g: &Global, params: &[(String, String)], parity_change: bool, sink: &mut Sink) -> Input<()> {
    let degree = g.degree.unwrap_or(3) as usize;
    for spec in module_specs(g, params)? {
        let spec = spec.with_parity_change(parity_change);
        let label = spec.label();
        let module = spec.build()?;
        let v = module.check_module();
        let mut r = Report::pass_if("module", &label, v.is_empty());
        if let Some(v) = v.first() {
            r = r.witness(format!("(i={}, j={}, u={}, z={}): {}", v.i, v.j, v.u, v.z, v.residual));
        }
        sink.push(r);
        if !module.action_params().is_empty() || !module.algebra().params().is_empty() {
            sink.push(Report::new("irreducibility", &label, Status::Skipped).detail("symbolic parameters"));
            continue;
        }
        let r = match irreducibility_probe(&module, degree)? {
            Verdict::Reducible { witness, submodule } => {
                let w: Vec<String> = witness.iter().map(|p| p.to_string()).collect();
                Report::new("irreducibility", &label, Status::Pass)
                    .detail(format!("reducible, submodule of rank {}", submodule.rank()))
                    .witness(format!("({})", w.join(", ")))
            }
            Verdict::NoWitnessFound { candidates } => Report::new("irreducibility", &label, Status::Pass)
                .detail(format!("no proper submodule among {candidates} candidates of degree <= {degree}")),
        };
        sink.push(r);
    }
    Ok(())
}
