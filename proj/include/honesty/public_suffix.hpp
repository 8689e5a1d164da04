#pragma once

#include <string>
#include <string_view>
#include <unordered_set>

namespace honesty::trust {

/// Public-suffix rule set (normal, wildcard and exception rules).
class PublicSuffixList {
public:
    /// Parses the publicsuffix.org text format. Internationalized rules are
    /// stored in their ASCII (punycode) form.
    static PublicSuffixList parse(std::string_view content);
    static PublicSuffixList load(const std::string& path);
    /// ICANN snapshot compiled into the library.
    static const PublicSuffixList& bundled();

    /// Public suffix of a lowercase ASCII host. Unlisted TLDs fall back to
    /// the implicit "*" rule (the last label).
    std::string public_suffix(std::string_view host) const;

    /// Public suffix plus one label, or the host itself when it is a bare
    /// public suffix.
    std::string registrable_domain(std::string_view host) const;

    std::size_t size() const { return rules_.size() + wildcards_.size() + exceptions_.size(); }

private:
    std::unordered_set<std::string> rules_;
    std::unordered_set<std::string> wildcards_;   // "*.ck" stored as "ck"
    std::unordered_set<std::string> exceptions_;  // "!www.ck" stored as "www.ck"
};

/// Converts an internationalized host name to ASCII (IDNA/UTS 46), lowercase.
/// Returns an empty string when the name is invalid.
std::string host_to_ascii(std::string_view host);

}  // namespace honesty::trust
