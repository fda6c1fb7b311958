// Each example compiled in place and run as a test.

mod admissible_values {
    #![allow(dead_code)]
    include!("../examples/admissible_values.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod curvature_and_einstein {
    #![allow(dead_code)]
    include!("../examples/curvature_and_einstein.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod degree_of_mobility {
    #![allow(dead_code)]
    include!("../examples/degree_of_mobility.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod metric_cones {
    #![allow(dead_code)]
    include!("../examples/metric_cones.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod metric_files {
    #![allow(dead_code)]
    include!("../examples/metric_files.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod null_cone {
    #![allow(dead_code)]
    include!("../examples/null_cone.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod projective_pairs {
    #![allow(dead_code)]
    include!("../examples/projective_pairs.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod projective_vector_fields {
    #![allow(dead_code)]
    include!("../examples/projective_vector_fields.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod realization_products {
    #![allow(dead_code)]
    include!("../examples/realization_products.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod symbolic_expressions {
    #![allow(dead_code)]
    include!("../examples/symbolic_expressions.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod verify_solutions {
    #![allow(dead_code)]
    include!("../examples/verify_solutions.rs");

    #[test]
    fn runs() {
        main();
    }
}

mod warped_family {
    #![allow(dead_code)]
    include!("../examples/warped_family.rs");

    #[test]
    fn runs() {
        main();
    }
}
