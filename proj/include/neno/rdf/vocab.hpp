#pragma once

#include <string>
#include <string_view>

#include "neno/rdf/term.hpp"

// Well-known IRIs used throughout the stack.
namespace neno::vocab {

inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kNeno = "http://neno.lanl.gov#";

inline std::string rdf(std::string_view local) { return std::string(kRdf) + std::string(local); }
inline std::string rdfs(std::string_view local) { return std::string(kRdfs) + std::string(local); }
inline std::string owl(std::string_view local) { return std::string(kOwl) + std::string(local); }
inline std::string xsd(std::string_view local) { return std::string(kXsd) + std::string(local); }
inline std::string neno(std::string_view local) { return std::string(kNeno) + std::string(local); }

inline rdf::Term rdf_uri(std::string_view local) { return rdf::Term::uri(rdf(local)); }
inline rdf::Term rdfs_uri(std::string_view local) { return rdf::Term::uri(rdfs(local)); }
inline rdf::Term owl_uri(std::string_view local) { return rdf::Term::uri(owl(local)); }
inline rdf::Term xsd_uri(std::string_view local) { return rdf::Term::uri(xsd(local)); }
inline rdf::Term neno_uri(std::string_view local) { return rdf::Term::uri(neno(local)); }

inline rdf::Term type() { return rdf_uri("type"); }
inline rdf::Term sub_class_of() { return rdfs_uri("subClassOf"); }
inline rdf::Term first() { return rdf_uri("first"); }
inline rdf::Term rest() { return rdf_uri("rest"); }
inline rdf::Term nil() { return rdf_uri("nil"); }

inline rdf::Term boolean(bool v) { return rdf::Term::literal(v ? "true" : "false", xsd("boolean")); }
inline rdf::Term integer(long long v) { return rdf::Term::literal(std::to_string(v), xsd("integer")); }
inline rdf::Term string(std::string v) { return rdf::Term::literal(std::move(v), xsd("string")); }

} // namespace neno::vocab
