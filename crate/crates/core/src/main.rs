use std::process::ExitCode;

use delay_logistic::io::{parse_config, run, write_report};

fn main() -> ExitCode {
    let cfg = match parse_config(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(Ok(clap_err)) => {
            let code = clap_err.exit_code();
            let _ = clap_err.print();
            return ExitCode::from(code as u8);
        }
        Err(Err(e)) => return fail(e),
    };
    let report = match run(&cfg) {
        Ok(report) => report,
        Err(e) => return fail(e),
    };
    if let Err(e) = write_report(&report, &cfg.out_dir()) {
        return fail(e);
    }
    print!("{}", report.summary_json());
    ExitCode::SUCCESS
}

fn fail(e: delay_logistic::io::CliError) -> ExitCode {
    eprintln!("dlogistic: {e}");
    ExitCode::from(e.exit_code() as u8)
}
