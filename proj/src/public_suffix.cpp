#include "honesty/public_suffix.hpp"

#include "honesty/error.hpp"

#include <unicode/bytestream.h>
#include <unicode/idna.h>

#include <algorithm>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace honesty::embedded {
extern const std::string_view public_suffix_list;
}

namespace honesty::trust {

namespace {

bool is_ascii(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

}  // namespace

std::string host_to_ascii(std::string_view host) {
    if (is_ascii(host)) return ascii_lower(host);
    UErrorCode status = U_ZERO_ERROR;
    thread_local std::unique_ptr<icu::IDNA> idna(icu::IDNA::createUTS46Instance(
        UIDNA_NONTRANSITIONAL_TO_ASCII | UIDNA_NONTRANSITIONAL_TO_UNICODE, status));
    if (!idna) return {};
    std::string out;
    icu::StringByteSink<std::string> sink(&out);
    icu::IDNAInfo info;
    status = U_ZERO_ERROR;
    idna->nameToASCII_UTF8(icu::StringPiece(host.data(), static_cast<int32_t>(host.size())), sink,
                           info, status);
    if (U_FAILURE(status) || info.hasErrors()) return {};
    return out;
}

PublicSuffixList PublicSuffixList::parse(std::string_view content) {
    PublicSuffixList list;
    std::size_t pos = 0;
    while (pos < content.size()) {
        auto nl = content.find('\n', pos);
        auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                     : nl - pos);
        pos = nl == std::string_view::npos ? content.size() : nl + 1;
        // A rule is the first whitespace-delimited field of a non-comment line.
        auto end = line.find_first_of(" \t\r");
        line = line.substr(0, end);
        if (line.empty() || line.starts_with("//")) continue;

        bool exception = false, wildcard = false;
        if (line.front() == '!') {
            exception = true;
            line.remove_prefix(1);
        } else if (line.starts_with("*.")) {
            wildcard = true;
            line.remove_prefix(2);
        }
        auto rule = host_to_ascii(line);
        if (rule.empty()) continue;
        if (exception) {
            list.exceptions_.insert(std::move(rule));
        } else if (wildcard) {
            list.wildcards_.insert(std::move(rule));
        } else {
            list.rules_.insert(std::move(rule));
        }
    }
    return list;
}

PublicSuffixList PublicSuffixList::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open public suffix list " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

const PublicSuffixList& PublicSuffixList::bundled() {
    static const PublicSuffixList list = parse(embedded::public_suffix_list);
    return list;
}

std::string PublicSuffixList::public_suffix(std::string_view host) const {
    std::vector<std::size_t> starts{0};
    for (std::size_t i = 0; i < host.size(); ++i) {
        if (host[i] == '.') starts.push_back(i + 1);
    }
    // Walk from the longest candidate to the shortest; the first match is the
    // longest matching rule.
    for (std::size_t k = 0; k < starts.size(); ++k) {
        auto candidate = host.substr(starts[k]);
        std::string key(candidate);
        if (exceptions_.contains(key)) {
            // An exception rule's suffix is the rule minus its leftmost label.
            return k + 1 < starts.size() ? std::string(host.substr(starts[k + 1])) : key;
        }
        if (rules_.contains(key)) return key;
        if (k + 1 < starts.size() && wildcards_.contains(std::string(host.substr(starts[k + 1])))) {
            return key;
        }
    }
    return std::string(host.substr(starts.back()));
}

std::string PublicSuffixList::registrable_domain(std::string_view host) const {
    const auto suffix = public_suffix(host);
    if (suffix.size() >= host.size()) return std::string(host);
    auto head = host.substr(0, host.size() - suffix.size() - 1);
    auto dot = head.rfind('.');
    auto label = dot == std::string_view::npos ? head : head.substr(dot + 1);
    return std::string(label) + "." + suffix;
}

}  // namespace honesty::trust
