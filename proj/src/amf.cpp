#include "orbit5gc/amf.hpp"

#include <algorithm>

namespace orbit5gc {

const char* amf_ue_state_name(AmfUeState s) {
    switch (s) {
        case AmfUeState::Deregistered: return "Deregistered";
        case AmfUeState::AuthPending: return "AuthPending";
        case AmfUeState::Registered: return "Registered";
    }
    return "?";
}

Amf::Amf(Simulator& sim, Tracer& tracer, Smf& smf, Config cfg, std::uint64_t seed)
    : sim_(sim), tracer_(tracer), smf_(smf), cfg_(cfg), rng_(seed ^ 0x414d465f6e6f6e63ull) {}

void Amf::add_subscriber(const nas::Supi& supi, std::vector<std::uint8_t> key) {
    subscribers_[supi.digits()] = std::move(key);
}

std::optional<nas::Supi> Amf::supi_for(const ngap::NgapEnvelope& env) const {
    auto it = ngap_assoc_.find({env.gnb_id, env.ue_ran_id});
    if (it == ngap_assoc_.end()) return std::nullopt;
    auto supi = nas::Supi::parse(it->second);
    if (!supi.ok()) return std::nullopt;
    return supi.value();
}

void Amf::handle_uplink(const ngap::NgapEnvelope& env) {
    auto decoded = nas::decode(env.nas_payload);
    if (!decoded.ok()) {
        trace_error("DecodeFailed", nas::decode_error_name(decoded.error()));
        return;
    }
    const nas::NasMessage& msg = decoded.value();

    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::NasRecv);
    rec["src"] = "gnb:" + std::to_string(env.gnb_id);
    rec["dst"] = "amf";
    rec["msg_type"] = nas::message_type_name(msg.type);
    rec["size"] = env.nas_payload.size();
    auto known = supi_for(env);
    if (known) rec["supi"] = known->digits();

    if (msg.type == nas::MessageType::RegistrationRequest) {
        on_registration_request(env, msg);
        return;
    }
    if (!known) {
        trace_error("UnknownUe", nas::message_type_name(msg.type));
        return;
    }
    switch (msg.type) {
        case nas::MessageType::AuthenticationResponse: on_auth_response(*known, msg); break;
        case nas::MessageType::RegistrationComplete: on_registration_complete(*known); break;
        case nas::MessageType::PduSessionEstablishmentRequest: on_session_request(*known, msg); break;
        case nas::MessageType::PduSessionReleaseRequest: on_session_release(*known, msg); break;
        case nas::MessageType::DeregistrationRequest: on_deregistration(*known); break;
        default: trace_error("UnexpectedMessage", nas::message_type_name(msg.type)); break;
    }
}

void Amf::on_registration_request(const ngap::NgapEnvelope& env, const nas::NasMessage& msg) {
    const auto* supi_ie = msg.find_ie(nas::ie::kSupi);
    auto supi = nas::Supi::parse(std::string(supi_ie->value.begin(), supi_ie->value.end()));
    if (!supi.ok()) {
        trace_error("BadSupi", "registration request");
        return;
    }

    auto key_it = subscribers_.find(supi.value().digits());
    if (key_it == subscribers_.end()) {
        // No context yet; answer on the envelope's return path.
        UeContext ephemeral;
        ephemeral.supi = supi.value();
        ephemeral.gnb_id = env.gnb_id;
        ephemeral.ue_ran_id = env.ue_ran_id;
        trace_error("UnknownSubscriber", supi.value().digits());
        send_nas(ephemeral, nas::make_registration_reject(nas::cause::kUnknownSubscriber),
                 ngap::Procedure::DownlinkNasTransport);
        return;
    }

    // Re-registration replaces any existing context; sessions go first.
    if (contexts_.count(supi.value().digits())) {
        smf_.release_all(supi.value());
        remove_context(supi.value());
    }

    UeContext ctx;
    ctx.supi = supi.value();
    ctx.state = AmfUeState::AuthPending;
    ctx.gnb_id = env.gnb_id;
    ctx.ue_ran_id = env.ue_ran_id;
    if (const auto* slice = msg.find_ie(nas::ie::kSliceId); slice && slice->value.size() == 1)
        ctx.slice_id = slice->value[0];
    ngap_assoc_[{env.gnb_id, env.ue_ran_id}] = supi.value().digits();
    contexts_[supi.value().digits()] = ctx;
    start_authentication(contexts_[supi.value().digits()]);
}

void Amf::start_authentication(UeContext& ctx) {
    ctx.sec.seq = ++last_seq_[ctx.supi.digits()];
    for (std::size_t i = 0; i < auth::kNonceBytes; i += 8) {
        const std::uint64_t r = rng_();
        for (std::size_t j = 0; j < 8; ++j) ctx.sec.nonce[i + j] = static_cast<std::uint8_t>(r >> (8 * j));
    }
    trace_state(ctx.supi, AmfUeState::AuthPending);
    send_nas(ctx, nas::make_authentication_request(ctx.sec.nonce, ctx.sec.seq),
             ngap::Procedure::DownlinkNasTransport);

    const std::string supi = ctx.supi.digits();
    const std::uint32_t seq = ctx.sec.seq;
    sim_.after(cfg_.auth_pending_timeout_us, [this, supi, seq] {
        auto it = contexts_.find(supi);
        if (it == contexts_.end() || it->second.state != AmfUeState::AuthPending ||
            it->second.sec.seq != seq)
            return;
        trace_error("AuthTimeout", supi);
        remove_context(it->second.supi);
    });
}

void Amf::on_auth_response(const nas::Supi& supi, const nas::NasMessage& msg) {
    auto it = contexts_.find(supi.digits());
    if (it == contexts_.end()) {
        trace_error("UnknownUe", "auth response");
        return;
    }
    UeContext& ctx = it->second;
    const auto* digest_ie = msg.find_ie(nas::ie::kAuthDigest);
    const auto& key = subscribers_.at(supi.digits());
    const auto challenge = auth::auth_challenge_bytes(ctx.sec.nonce, ctx.sec.seq);
    const auto expected = auth::compute_auth_response(key, challenge);
    const bool match = digest_ie->value.size() == expected.size() &&
                       std::equal(expected.begin(), expected.end(), digest_ie->value.begin());

    if (ctx.state == AmfUeState::Registered) {
        if (match) {
            // Duplicate response for the current challenge: the accept
            // likely got lost, resend it.
            send_nas(ctx, nas::make_registration_accept(), ngap::Procedure::InitialContextSetup);
        } else {
            trace_error("StaleAuthResponse", supi.digits());
        }
        return;
    }
    if (ctx.state != AmfUeState::AuthPending) {
        trace_error("UnexpectedMessage", "auth response while deregistered");
        return;
    }
    if (!match) {
        send_nas(ctx, nas::make_registration_reject(nas::cause::kAuthFailure),
                 ngap::Procedure::DownlinkNasTransport);
        trace_error("AuthFailure", supi.digits());
        remove_context(supi);
        return;
    }
    ctx.state = AmfUeState::Registered;
    ctx.registered_at = sim_.now();
    trace_state(supi, AmfUeState::Registered);
    send_nas(ctx, nas::make_registration_accept(), ngap::Procedure::InitialContextSetup);
}

void Amf::on_registration_complete(const nas::Supi& supi) {
    auto it = contexts_.find(supi.digits());
    if (it == contexts_.end() || it->second.state != AmfUeState::Registered) {
        trace_error("UnexpectedMessage", "registration complete outside Registered");
        return;
    }
    it->second.complete = true;
    if (on_complete_) on_complete_(supi);
}

void Amf::on_session_request(const nas::Supi& supi, const nas::NasMessage& msg) {
    auto it = contexts_.find(supi.digits());
    UeContext& ctx = it->second;
    const auto* dnn_ie = msg.find_ie(nas::ie::kDnn);
    const auto* qos_ie = msg.find_ie(nas::ie::kQosClass);
    const std::string dnn(dnn_ie->value.begin(), dnn_ie->value.end());
    const std::uint8_t qos = qos_ie->value.empty() ? 0 : qos_ie->value[0];

    if (ctx.state != AmfUeState::Registered) {
        trace_error("NotRegistered", supi.digits());
        send_nas(ctx, nas::make_session_reject(nas::cause::kNotRegistered),
                 ngap::Procedure::DownlinkNasTransport);
        return;
    }
    auto accept = smf_.establish_session(supi, dnn, qos);
    if (!accept.ok()) {
        const std::uint8_t cause = accept.error() == SmfError::UnknownDataNetwork
                                       ? nas::cause::kUnknownDataNetwork
                                       : nas::cause::kPoolExhausted;
        trace_error(smf_error_name(accept.error()), dnn);
        send_nas(ctx, nas::make_session_reject(cause), ngap::Procedure::DownlinkNasTransport);
        return;
    }
    ctx.session_ids.insert(accept.value().session_id);
    send_nas(ctx,
             nas::make_session_accept(accept.value().session_id, accept.value().ue_ip,
                                      accept.value().qos_class, accept.value().tunnel_id),
             ngap::Procedure::DownlinkNasTransport);
}

void Amf::on_session_release(const nas::Supi& supi, const nas::NasMessage& msg) {
    auto it = contexts_.find(supi.digits());
    UeContext& ctx = it->second;
    const std::uint32_t session_id = nas::read_u32_be(msg.find_ie(nas::ie::kSessionId)->value);
    auto released = smf_.release_session(session_id);
    if (!released.ok()) {
        trace_error("UnknownSession", std::to_string(session_id));
        return;
    }
    ctx.session_ids.erase(session_id);
    send_nas(ctx, nas::make_session_release_complete(session_id), ngap::Procedure::DownlinkNasTransport);
}

void Amf::on_deregistration(const nas::Supi& supi) {
    auto it = contexts_.find(supi.digits());
    if (it == contexts_.end()) return;
    smf_.release_all(supi);
    it->second.session_ids.clear();
    remove_context(supi);
}

void Amf::remove_context(const nas::Supi& supi) {
    auto it = contexts_.find(supi.digits());
    if (it == contexts_.end()) return;
    // the argument may reference the context being erased
    const nas::Supi gone = it->second.supi;
    ngap_assoc_.erase({it->second.gnb_id, it->second.ue_ran_id});
    contexts_.erase(it);
    trace_state(gone, AmfUeState::Deregistered);
}

void Amf::send_nas(const UeContext& ctx, nas::NasMessage msg, ngap::Procedure proc) {
    auto encoded = nas::encode(msg);
    if (!encoded.ok()) {
        trace_error("EncodeFailed", nas::encode_error_name(encoded.error()));
        return;
    }
    ngap::NgapEnvelope env{proc, ctx.gnb_id, ctx.ue_ran_id, encoded.take()};
    const nas::MessageType type = msg.type;
    const std::string supi = ctx.supi.digits();
    sim_.after(cfg_.processing_us, [this, env = std::move(env), type, supi] {
        auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::NasSend);
        rec["src"] = "amf";
        rec["dst"] = "gnb:" + std::to_string(env.gnb_id);
        rec["msg_type"] = nas::message_type_name(type);
        rec["size"] = env.nas_payload.size();
        rec["supi"] = supi;
        if (send_downlink_) send_downlink_(env, type);
    });
}

void Amf::trace_state(const nas::Supi& supi, AmfUeState state) {
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::UeState);
    rec["side"] = "amf";
    rec["supi"] = supi.digits();
    rec["state"] = amf_ue_state_name(state);
}

void Amf::trace_error(const char* reason, const std::string& detail) {
    auto& rec = tracer_.append(sim_.now(), sim_.current_event(), kind::AmfError);
    rec["reason"] = reason;
    rec["detail"] = detail;
}

ContextStats Amf::context_table_stats() const {
    ContextStats stats;
    stats.active_ues = contexts_.size();
    for (const auto& [supi, ctx] : contexts_) {
        if (ctx.state == AmfUeState::Registered) ++stats.registered;
        stats.bytes_estimate += kUeContextBaseBytes + kSessionRefBytes * ctx.session_ids.size();
    }
    return stats;
}

const UeContext* Amf::find_context(const nas::Supi& supi) const {
    auto it = contexts_.find(supi.digits());
    return it == contexts_.end() ? nullptr : &it->second;
}

}  // namespace orbit5gc
