use proptest::prelude::*;

use purify::ast::{alpha_eq, Label, Signature};
use purify::pretty::{pretty_annotated, pretty_ty};
use purify::program::Program;
use purify::propcheck::{gen_term, GenConfig};
use purify::translate::Mode;

fn with_decls(sig: &Signature, body: &str) -> String {
    let mut s = String::new();
    for d in sig.iter() {
        let kw = match d.kind {
            purify::ast::ConstKind::Effectful => "effect",
            purify::ast::ConstKind::Pure => "prim",
        };
        s.push_str(&format!("{kw} {} : {}\n", d.name, pretty_ty(&d.ty)));
    }
    s.push_str(&format!("purify {{ {body} }}\n"));
    s
}

fn config(seed: u64, label: Label) -> GenConfig {
    GenConfig {
        max_depth: 5,
        seed,
        signature: Signature::standard(),
        label,
        goal_type: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn source_terms_print_and_reparse(seed in any::<u64>()) {
        let t = gen_term(&config(seed, Label::Src)).unwrap();
        let text = with_decls(&Signature::standard(), &pretty_annotated(&t));
        let back = Program::parse(&text).unwrap();
        prop_assert!(alpha_eq(&back.term.erase_types(), &t.erase_types()), "{}", text);
    }

    #[test]
    fn annotated_translations_reparse(seed in any::<u64>()) {
        let t = gen_term(&config(seed, Label::Src)).unwrap();
        let p = Program::parse(&with_decls(&Signature::standard(), &pretty_annotated(&t))).unwrap();
        for mode in [Mode::Opt, Mode::Naive, Mode::Seq] {
            let out = p.translate(mode, false).unwrap();
            let text = out.render(true);
            let back = Program::parse(&text).unwrap();
            prop_assert_eq!(&back.ty, &out.ty, "{}", text);
        }
    }
}
