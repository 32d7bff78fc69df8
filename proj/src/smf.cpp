#include "orbit5gc/smf.hpp"

#include <cassert>

namespace orbit5gc {

const char* smf_error_name(SmfError e) {
    switch (e) {
        case SmfError::Ok: return "Ok";
        case SmfError::UnknownDataNetwork: return "UnknownDataNetwork";
        case SmfError::PoolExhausted: return "PoolExhausted";
        case SmfError::UnknownSession: return "UnknownSession";
    }
    return "?";
}

IpPool::IpPool(Ipv4Cidr cidr) : cidr_(cidr) {
    const std::uint32_t mask = cidr.prefix_len >= 32 ? 0xFFFFFFFFu : ~((1u << (32 - cidr.prefix_len)) - 1u);
    const std::uint32_t network = cidr.base & mask;
    const std::uint32_t broadcast = network | ~mask;
    first_usable_ = network + 2;  // past network address and .1 gateway
    last_usable_ = broadcast == network ? network : broadcast - 1;
    next_ = first_usable_;
}

std::size_t IpPool::capacity() const {
    return last_usable_ >= first_usable_ ? last_usable_ - first_usable_ + 1 : 0;
}

Result<std::uint32_t, SmfError> IpPool::allocate() {
    if (!free_list_.empty()) {
        const std::uint32_t addr = free_list_.back();
        free_list_.pop_back();
        ++allocated_;
        return addr;
    }
    if (next_ > last_usable_ || capacity() == 0) return SmfError::PoolExhausted;
    ++allocated_;
    return next_++;
}

void IpPool::release(std::uint32_t addr) {
    assert(allocated_ > 0);
    --allocated_;
    free_list_.push_back(addr);
}

Smf::Smf(Simulator& sim, Tracer& tracer, std::vector<DataNetworkConfig> dns, IpPool pool, Upf& upf)
    : sim_(sim), tracer_(tracer), dns_(std::move(dns)), pool_(pool), upf_(upf) {
    std::vector<DnTarget> table;
    table.reserve(dns_.size());
    for (const auto& dn : dns_) table.push_back(dn.target);
    upf_.set_dn_table(std::move(table));
}

const DataNetworkConfig* Smf::find_dn(const std::string& name) const {
    for (const auto& dn : dns_)
        if (dn.name == name) return &dn;
    return nullptr;
}

Result<SessionAccept, SmfError> Smf::establish_session(const nas::Supi& supi, const std::string& dn_name,
                                                       std::uint8_t qos_class) {
    const DataNetworkConfig* dn = find_dn(dn_name);
    if (!dn) return SmfError::UnknownDataNetwork;

    for (const auto& [id, s] : sessions_) {
        if (s.state == SessionState::Active && s.supi == supi && s.dn_name == dn_name)
            return SessionAccept{s.session_id, s.ue_ip, s.qos_class, s.tunnel_id};
    }

    auto addr = pool_.allocate();
    if (!addr.ok()) return addr.error();

    PduSession s{next_session_id_++, supi, dn_name, addr.value(), next_tunnel_id_++, qos_class,
                 SessionState::Activating};

    std::uint8_t dn_index = 0;
    for (std::size_t i = 0; i < dns_.size(); ++i)
        if (dns_[i].name == dn_name) dn_index = static_cast<std::uint8_t>(i);

    ForwardingRule rule{s.session_id, s.tunnel_id, s.ue_ip, dn->target};
    const UpfError err = upf_.handle_n4(encode_n4(true, rule, dn_index));
    assert(err == UpfError::Ok);
    (void)err;

    s.state = SessionState::Active;
    sessions_[s.session_id] = s;
    trace_session(s);
    return SessionAccept{s.session_id, s.ue_ip, s.qos_class, s.tunnel_id};
}

Result<PduSession, SmfError> Smf::release_session(std::uint32_t session_id) {
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() || it->second.state != SessionState::Active)
        return SmfError::UnknownSession;

    ForwardingRule rule{session_id, it->second.tunnel_id, it->second.ue_ip, DnTarget::Ground};
    const UpfError err = upf_.handle_n4(encode_n4(false, rule, 0));
    assert(err == UpfError::Ok);
    (void)err;

    it->second.state = SessionState::Released;
    pool_.release(it->second.ue_ip);
    trace_session(it->second);
    PduSession released = it->second;
    sessions_.erase(it);
    return released;
}

std::vector<std::uint32_t> Smf::release_all(const nas::Supi& supi) {
    std::vector<std::uint32_t> ids;
    for (const auto& [id, s] : sessions_)
        if (s.supi == supi && s.state == SessionState::Active) ids.push_back(id);
    for (std::uint32_t id : ids) release_session(id);
    return ids;
}

std::size_t Smf::active_session_count() const {
    std::size_t n = 0;
    for (const auto& [id, s] : sessions_)
        if (s.state == SessionState::Active) ++n;
    return n;
}

std::vector<std::uint32_t> Smf::active_session_ids() const {
    std::vector<std::uint32_t> ids;
    for (const auto& [id, s] : sessions_)
        if (s.state == SessionState::Active) ids.push_back(id);
    return ids;
}

void Smf::trace_session(const PduSession& s) {
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::SessionState);
    rec["session_id"] = s.session_id;
    rec["supi"] = s.supi.digits();
    rec["dn"] = s.dn_name;
    rec["ue_ip"] = format_ipv4(s.ue_ip);
    rec["state"] = session_state_name(s.state);
}

}  // namespace orbit5gc
