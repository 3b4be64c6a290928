//! Inspect the bundled Sock Shop application model: services, edges,
//! propagated request rates, and dependency closures.
//!
//! ```bash
//! cargo run -p fogplace --example sock_shop_model
//! ```

use fogplace::model::AppId;
use fogplace::scenarios::sock_shop;

fn main() {
    let app = sock_shop(AppId(0), "sock-shop", 0);

    println!(
        "app {} — entry {}",
        app.name(),
        app.service_name(app.entry())
    );
    println!("edges:");
    for edge in app.edges() {
        println!(
            "  {} -> {} (cpu {} MI, {} bytes, selectivity {})",
            app.service_name(edge.from),
            app.service_name(edge.to),
            edge.cpu_mi,
            edge.bytes,
            edge.selectivity
        );
    }

    println!("per-entry invocation rates:");
    for service in app.services() {
        println!(
            "  {:<10} rate {:.1}  demand {:.0} MI/invocation",
            app.service_name(*service),
            app.rate_per_entry(*service),
            app.cpu_demand(*service),
        );
    }

    let loop_names: Vec<&str> = app
        .loop_services()
        .iter()
        .map(|s| app.service_name(*s))
        .collect();
    println!("latency loop: {}", loop_names.join(" -> "));

    // The closure of a service is everything that runs when it is invoked.
    for name in ["edge", "orders", "accounts"] {
        let service = app.service_by_name(name).unwrap();
        let closure: Vec<&str> = app
            .transitive_closure(service)
            .into_iter()
            .map(|s| app.service_name(s))
            .collect();
        println!("closure({name}) = {{{}}}", closure.join(", "));
    }
}
