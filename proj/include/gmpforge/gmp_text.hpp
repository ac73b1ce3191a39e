#pragma once

#include <memory>
#include <string>

#include "gmpforge/gmp.hpp"

namespace gmpforge {

// Compact s-expression forms. Trees are self-describing: every token that
// depends on outside context carries its kind, so a tree parses standalone.
//
//   (num 7)  (txt "a")  (bool true)
//   (rand num)  (response bool)  (outfail)  (lastout 1 txt)  (execcount)
//   (adfcall num)
//   (add a b) (div a b) (mul a b) (sub a b) (if c x y) (loop c body)
//   (len x) (eq a b) (gt a b) (lt a b) (ne a b) (nonnull x)
//
// A whole micro-program serializes as
//   (gmp (returns bool) (adf num TREE) (mains (main txt TREE) ...))
std::string serialize_tree(const TreeNode& node);
std::string serialize_gmp(const GmpIndividual& individual);

// Parses a standalone tree, inferring kinds bottom-up. Structural or kind
// violations raise ParseError.
std::unique_ptr<TreeNode> parse_tree(const std::string& text);

// Parses a whole micro-program and type-checks it against its own recorded
// signature. The state starts fresh.
GmpIndividual parse_gmp(const std::string& text);

// Indented multi-line rendering for human inspection.
std::string pretty_print_tree(const TreeNode& node);
std::string pretty_print_gmp(const GmpIndividual& individual);

} // namespace gmpforge
