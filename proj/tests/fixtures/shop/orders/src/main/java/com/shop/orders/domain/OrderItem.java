package com.shop.orders.domain;

import javax.persistence.Entity;
import javax.persistence.Id;

@Entity
public class OrderItem {
    @Id
    private Long id;
    private String sku;
    private int quantity;
}
