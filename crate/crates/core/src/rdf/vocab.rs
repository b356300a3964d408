//! Reserved vocabulary IRIs used across the crate.

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const OWL_NS: &str = "http://www.w3.org/2002/07/owl#";
pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

pub const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
pub const RDF_PROPERTY: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#Property";
pub const RDFS_CLASS: &str = "http://www.w3.org/2000/01/rdf-schema#Class";
pub const RDFS_SUBCLASS_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
pub const RDFS_SUBPROPERTY_OF: &str = "http://www.w3.org/2000/01/rdf-schema#subPropertyOf";
pub const RDFS_LABEL: &str = "http://www.w3.org/2000/01/rdf-schema#label";
pub const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
pub const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";
pub const OWL_CLASS: &str = "http://www.w3.org/2002/07/owl#Class";
pub const OWL_OBJECT_PROPERTY: &str = "http://www.w3.org/2002/07/owl#ObjectProperty";
pub const OWL_DATATYPE_PROPERTY: &str = "http://www.w3.org/2002/07/owl#DatatypeProperty";
pub const OWL_ANNOTATION_PROPERTY: &str = "http://www.w3.org/2002/07/owl#AnnotationProperty";

/// Predicate of the artifact edges linking confirmed-equivalent terms of two
/// ontologies inside a joint embedding space.
pub const BRIDGE_PREDICATE: &str = "urn:ontokg:bridge";

/// Predicates that declare schema structure rather than carry domain edges.
pub fn is_declaration_predicate(iri: &str) -> bool {
    iri == RDF_TYPE || iri == RDFS_SUBCLASS_OF || iri == RDFS_SUBPROPERTY_OF
}

/// Objects of `rdf:type` that declare a class.
pub fn is_class_declaration_object(iri: &str) -> bool {
    iri == OWL_CLASS || iri == RDFS_CLASS
}

/// Objects of `rdf:type` that declare a property.
pub fn is_property_declaration_object(iri: &str) -> bool {
    iri == OWL_OBJECT_PROPERTY
        || iri == OWL_DATATYPE_PROPERTY
        || iri == OWL_ANNOTATION_PROPERTY
        || iri == RDF_PROPERTY
}

pub fn is_vocab_iri(iri: &str) -> bool {
    iri.starts_with(RDF_NS)
        || iri.starts_with(RDFS_NS)
        || iri.starts_with(OWL_NS)
        || iri.starts_with(XSD_NS)
        || iri == BRIDGE_PREDICATE
}
